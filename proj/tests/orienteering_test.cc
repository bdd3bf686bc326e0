// Copyright 2026 The kopkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kopkit/orienteering.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "gtest/gtest.h"
#include "kopkit/error.h"

namespace kopkit {
namespace {

// Builds a random instance with integer scores and a matching matrix.
struct Scenario {
  Instance instance;
  CostMatrix matrix;
};

Scenario RandomScenario(std::uint64_t seed, int n, int headings, int speeds) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 10.0);
  std::uniform_int_distribution<int> score(1, 30);
  Scenario sc;
  sc.instance.name = "random" + std::to_string(seed);
  for (int i = 0; i < n; ++i) {
    const bool depot = i == 0 || i == n - 1;
    sc.instance.locations.push_back(
        {pos(rng), pos(rng), depot ? 0.0 : static_cast<double>(score(rng))});
  }
  const Discretization d = Discretization::Uniform(headings, speeds, 2.0);
  sc.matrix = BuildCostMatrix(sc.instance.locations, d,
                              AxisLimitPolicy::kPerAxisBox, 2.0, 1.0, 1);
  return sc;
}

// Unpruned enumeration of every location sequence and every state
// assignment. Returns the best objective and, among optima, the
// lexicographically smallest tour.
struct OracleResult {
  bool found = false;
  double objective = -1.0;
  Tour tour;
};

void EnumerateStates(const Instance& inst, const CostMatrix& m,
                     const std::vector<int>& locs, std::size_t k, Tour& tour,
                     OracleResult& out) {
  const int states = m.states_per_location();
  if (k == locs.size()) {
    double time = 0.0;
    double objective = 0.0;
    for (std::size_t q = 1; q < tour.size(); ++q) {
      time += m(tour[q - 1], tour[q]);
      objective += inst.locations[tour[q].location].priority;
    }
    if (!(time <= inst.budget + kBudgetTolerance)) return;
    if (!out.found || objective > out.objective ||
        (objective == out.objective && tour < out.tour)) {
      out.found = true;
      out.objective = objective;
      out.tour = tour;
    }
    return;
  }
  for (int s = 0; s < states; ++s) {
    tour.push_back({locs[k], s / m.speeds(), s % m.speeds()});
    EnumerateStates(inst, m, locs, k + 1, tour, out);
    tour.pop_back();
  }
}

OracleResult PermutationOracle(const Instance& inst, const CostMatrix& m) {
  const int n = inst.size();
  const int interior = n - 2;
  OracleResult out;
  for (int mask = 0; mask < (1 << interior); ++mask) {
    std::vector<int> chosen;
    for (int b = 0; b < interior; ++b)
      if (mask & (1 << b)) chosen.push_back(b + 1);
    do {
      std::vector<int> locs = {0};
      locs.insert(locs.end(), chosen.begin(), chosen.end());
      locs.push_back(n - 1);
      Tour tour;
      EnumerateStates(inst, m, locs, 0, tour, out);
    } while (std::next_permutation(chosen.begin(), chosen.end()));
  }
  return out;
}

// Random structurally valid tour with random states.
Tour RandomTour(const Instance& inst, const CostMatrix& m, std::mt19937_64& rng) {
  std::vector<int> interior(inst.size() - 2);
  std::iota(interior.begin(), interior.end(), 1);
  std::shuffle(interior.begin(), interior.end(), rng);
  std::uniform_int_distribution<int> count(0, static_cast<int>(interior.size()));
  interior.resize(count(rng));
  std::uniform_int_distribution<int> state(0, m.states_per_location() - 1);
  auto pose = [&](int loc) {
    const int s = state(rng);
    return PoseState{loc, s / m.speeds(), s % m.speeds()};
  };
  Tour tour = {pose(0)};
  for (const int p : interior) tour.push_back(pose(p));
  tour.push_back(pose(inst.end_index()));
  return tour;
}

TEST(ParseInstanceTest, ThreeLocations) {
  const Instance inst = ParseInstance("0 0 0\n10 0 0\n5 1 30\n");
  ASSERT_EQ(inst.size(), 3);
  EXPECT_EQ(inst.locations[0], (Location{0, 0, 0}));
  EXPECT_EQ(inst.locations[2], (Location{10, 0, 0}));
  EXPECT_EQ(inst.locations[1], (Location{5, 1, 30}));
  EXPECT_EQ(inst.budget, 0.0);
}

TEST(ParseInstanceTest, LonePairIsMalformed) {
  try {
    ParseInstance("0 0\n");
    FAIL() << "expected MalformedLine";
  } catch (const MalformedLineError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedLine);
    EXPECT_EQ(e.line(), 1);
  }
}

TEST(ParseInstanceTest, CommentsBlankLinesAndBudgetHeader) {
  std::vector<std::string> warnings;
  const Instance inst = ParseInstance(
      "# header\n\n40 1\n  1 2 0  # start\n3 4 0\n\n5 6 7.5\n", "demo",
      &warnings);
  ASSERT_EQ(inst.size(), 3);
  EXPECT_EQ(inst.name, "demo");
  EXPECT_EQ(inst.locations[1], (Location{5, 6, 7.5}));
  EXPECT_EQ(inst.locations[2], (Location{3, 4, 0}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("line 3"), std::string::npos);
}

TEST(ParseInstanceTest, Errors) {
  auto line_of = [](const std::string& text) {
    try {
      ParseInstance(text);
    } catch (const MalformedLineError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("0 0 0\n1 1 1\n2 x 3\n"), 3);
  EXPECT_EQ(line_of("0 0 0\n1 1 1 1\n"), 2);
  EXPECT_EQ(line_of("0 0 0\n\n1 1\n"), 3);
  EXPECT_EQ(line_of("0 0 nan\n1 1 1\n"), 1);
  try {
    ParseInstance("# nothing\n1 2 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFewerThanTwoLocations);
  }
  EXPECT_THROW(ParseInstance(""), Error);
}

TEST(ParseInstanceTest, TsiligiridesSetTwo) {
  const Instance inst =
      LoadInstance(std::string(KOPKIT_DATA_DIR) + "/tsiligirides_set2.txt");
  EXPECT_EQ(inst.size(), 21);
  EXPECT_EQ(inst.name, "tsiligirides_set2");
  double total = 0.0;
  for (const auto& l : inst.locations) total += l.priority;
  EXPECT_EQ(total, 450.0);
  EXPECT_EQ(inst.locations.front().priority, 0.0);
  EXPECT_EQ(inst.locations.back().priority, 0.0);
  EXPECT_THROW(LoadInstance("/nonexistent/file.txt"), Error);
}

TEST(EvaluateTest, DepotToDepotAndOneLocation) {
  Instance inst = ParseInstance("0 0 0\n10 0 0\n5 0 30\n");
  inst.budget = 100;
  const Discretization d = Discretization::WithSpeeds(4, {1.0});
  const CostMatrix m =
      BuildCostMatrix(inst.locations, d, AxisLimitPolicy::kPerAxisBox, 1.0, 1.0);
  const Tour direct = {{0, 3, 0}, {2, 3, 0}};
  const Solution a = Evaluate(direct, m, inst);
  EXPECT_EQ(a.objective, 0.0);
  ASSERT_EQ(a.leg_durations.size(), 1u);
  EXPECT_NEAR(a.total_time, 10.0, 1e-9);  // cruising at 1 m/s along +x
  const Tour via = {{0, 3, 0}, {1, 3, 0}, {2, 3, 0}};
  const Solution b = Evaluate(via, m, inst);
  EXPECT_EQ(b.objective, 30.0);
  EXPECT_NEAR(b.total_time, 10.0, 1e-9);
  EXPECT_TRUE(IsFeasible(b, inst));
}

TEST(IsFeasibleTest, BudgetAndStructure) {
  const Scenario sc = RandomScenario(11, 5, 2, 2);
  Instance inst = sc.instance;
  const Tour tour = {{0, 0, 1}, {2, 1, 1}, {4, 0, 0}};
  Solution sol = Evaluate(tour, sc.matrix, inst);
  inst.budget = sol.total_time;
  EXPECT_TRUE(IsFeasible(sol, inst));
  inst.budget = sol.total_time - 1e-3;
  EXPECT_FALSE(IsFeasible(sol, inst));
  inst.budget = 1e9;
  Solution repeated = Evaluate({{0, 0, 1}, {2, 1, 1}, {2, 0, 1}, {4, 0, 0}},
                               sc.matrix, inst);
  EXPECT_FALSE(IsFeasible(repeated, inst));
  Solution unanchored = Evaluate({{1, 0, 1}, {4, 0, 0}}, sc.matrix, inst);
  EXPECT_FALSE(IsFeasible(unanchored, inst));
  Solution bad_sum = sol;
  bad_sum.total_time += 1e-3;
  EXPECT_FALSE(IsFeasible(bad_sum, inst));
}

TEST(StartStatesTest, Policies) {
  const Discretization d = Discretization::Uniform(4, 3, 1.0);
  EXPECT_EQ(AllowedStartStates(StartStatePolicy::kFree, d).size(), 12u);
  EXPECT_EQ(AllowedStartStates(StartStatePolicy::kRest, d),
            (std::vector<int>{0, 3, 6, 9}));
  EXPECT_THROW(AllowedStartStates(StartStatePolicy::kRest,
                                  Discretization::WithSpeeds(4, {1.0})),
               Error);
  EXPECT_EQ(ParseStartStatePolicy("rest"), StartStatePolicy::kRest);
  EXPECT_THROW(ParseStartStatePolicy("still"), Error);
}

TEST(SolveExactTest, ZeroBudgetIsInfeasible) {
  Scenario sc = RandomScenario(3, 4, 2, 2);
  sc.instance.budget = 0.0;
  try {
    SolveExact(sc.instance, sc.matrix);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleBudget);
  }
}

TEST(SolveExactTest, VisitsTheReachableLocation) {
  Instance inst = ParseInstance("0 0 0\n10 0 0\n5 1 30\n");
  inst.budget = 60;
  const Discretization d = Discretization::Uniform(4, 2, 1.0);
  const CostMatrix m =
      BuildCostMatrix(inst.locations, d, AxisLimitPolicy::kPerAxisBox, 1.0, 1.0);
  const Solution sol = SolveExact(inst, m);
  EXPECT_EQ(sol.objective, 30.0);
  ASSERT_EQ(sol.tour.size(), 3u);
  EXPECT_EQ(sol.tour[1].location, 1);
  EXPECT_TRUE(IsFeasible(sol, inst));
}

TEST(SolveExactTest, SearchSpaceGuard) {
  const Scenario big = RandomScenario(4, 10, 1, 2);
  try {
    SolveExact(big.instance, big.matrix);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSearchSpaceTooLarge);
  }
  const Scenario wide = RandomScenario(5, 3, 3, 3);
  EXPECT_THROW(SolveExact(wide.instance, wide.matrix), Error);
  ExactOptions relaxed;
  relaxed.max_states = 9;
  Instance inst = wide.instance;
  inst.budget = 1e6;
  EXPECT_NO_THROW(SolveExact(inst, wide.matrix, relaxed));
}

TEST(SolveExactTest, RestStartUsesZeroSpeed) {
  Scenario sc = RandomScenario(6, 5, 2, 2);
  sc.instance.budget = 1e6;
  const Discretization d = Discretization::Uniform(2, 2, 2.0);
  ExactOptions options;
  options.start_states = AllowedStartStates(StartStatePolicy::kRest, d);
  const Solution sol = SolveExact(sc.instance, sc.matrix, options);
  EXPECT_EQ(sol.tour.front().speed, 0);
  EXPECT_EQ(sol.objective, std::accumulate(
                               sc.instance.locations.begin(),
                               sc.instance.locations.end(), 0.0,
                               [](double a, const Location& l) {
                                 return a + l.priority;
                               }));
}

TEST(SolveExactTest, MatchesPermutationOracle) {
  int nontrivial = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Scenario sc = RandomScenario(1000 + seed, 6, 2, 2);
    std::mt19937_64 rng(seed);
    const double direct = sc.matrix.at(0, 0, 5, 0);
    sc.instance.budget =
        std::uniform_real_distribution<double>(direct, 4.0 * direct + 20.0)(rng);
    const OracleResult oracle = PermutationOracle(sc.instance, sc.matrix);
    ASSERT_TRUE(oracle.found) << "seed " << seed;
    const Solution sol = SolveExact(sc.instance, sc.matrix);
    EXPECT_EQ(sol.objective, oracle.objective) << "seed " << seed;
    EXPECT_EQ(sol.tour, oracle.tour) << "seed " << seed;
    EXPECT_TRUE(IsFeasible(sol, sc.instance));
    if (sol.tour.size() >= 3 && sol.tour.size() <= 5) ++nontrivial;
  }
  EXPECT_GE(nontrivial, 10);
}

TEST(SolveExactTest, DominatesRandomFeasibleTours) {
  Scenario sc = RandomScenario(77, 6, 2, 2);
  sc.instance.budget = 30.0;
  const Solution best = SolveExact(sc.instance, sc.matrix);
  std::mt19937_64 rng(78);
  int feasible = 0;
  for (int trial = 0; trial < 20000 && feasible < 1000; ++trial) {
    const Solution sol = Evaluate(RandomTour(sc.instance, sc.matrix, rng),
                                  sc.matrix, sc.instance);
    if (!IsFeasible(sol, sc.instance)) continue;
    ++feasible;
    EXPECT_LE(sol.objective, best.objective);
  }
  EXPECT_EQ(feasible, 1000);
}

TEST(SolveExactTest, MonotoneInBudget) {
  Scenario sc = RandomScenario(91, 6, 2, 2);
  double previous = -1.0;
  for (double budget = 12.0; budget <= 60.0; budget += 4.0) {
    sc.instance.budget = budget;
    double objective = -1.0;
    try {
      objective = SolveExact(sc.instance, sc.matrix).objective;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kInfeasibleBudget);
    }
    EXPECT_GE(objective, previous) << "budget " << budget;
    previous = objective;
  }
  EXPECT_GT(previous, 0.0);
}

TEST(SolveExactTest, RelabelingInvariance) {
  Scenario sc = RandomScenario(5, 6, 2, 2);
  sc.instance.budget = 28.0;
  const Solution a = SolveExact(sc.instance, sc.matrix);
  // Reverse the interior labels.
  const int n = sc.instance.size();
  auto relabel = [n](int i) { return (i == 0 || i == n - 1) ? i : n - 1 - i; };
  Instance permuted = sc.instance;
  for (int i = 0; i < n; ++i) {
    permuted.locations[relabel(i)] = sc.instance.locations[i];
  }
  const CostMatrix pm = BuildCostMatrix(
      permuted.locations, Discretization::Uniform(2, 2, 2.0),
      AxisLimitPolicy::kPerAxisBox, 2.0, 1.0, 1);
  Tour moved = a.tour;
  for (auto& p : moved) p.location = relabel(p.location);
  const Solution b = Evaluate(moved, pm, permuted);
  EXPECT_EQ(b.objective, a.objective);
  EXPECT_NEAR(b.total_time, a.total_time, 1e-12);
  EXPECT_EQ(SolveExact(permuted, pm).objective, a.objective);
}

int CountRows(const std::string& lp) {
  std::istringstream in(lp);
  std::string line;
  bool in_rows = false;
  int rows = 0;
  static const std::regex row_name(R"(^ [A-Za-z_][A-Za-z0-9_]*:)");
  while (std::getline(in, line)) {
    if (line == "Subject To") {
      in_rows = true;
    } else if (line == "Bounds") {
      in_rows = false;
    } else if (in_rows && std::regex_search(line, row_name)) {
      ++rows;
    }
  }
  return rows;
}

std::vector<std::string> SectionLines(const std::string& lp,
                                      const std::string& section) {
  std::istringstream in(lp);
  std::string line;
  std::vector<std::string> out;
  bool inside = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != ' ') {
      inside = line == section;
      continue;
    }
    if (inside) out.push_back(line.substr(1));
  }
  return out;
}

TEST(ExportMilpTest, SmallestModel) {
  Instance inst = ParseInstance("0 0 0\n1 0 0\n");
  inst.budget = 5;
  const CostMatrix m = BuildCostMatrix(
      inst.locations, Discretization::WithSpeeds(1, {1.0}),
      AxisLimitPolicy::kPerAxisBox, 1.0, 1.0);
  const std::string lp = ExportMilp(inst, m);
  EXPECT_EQ(SectionLines(lp, "Binaries"),
            (std::vector<std::string>{"x_1_1_1_2_1_1"}));
  EXPECT_EQ(CountRows(lp), 1 + 1 + 1 + 0 + 1 + 4);
  EXPECT_NE(lp.find(" budget: + 1 x_1_1_1_2_1_1 <= 5\n"), std::string::npos);
  EXPECT_NE(lp.find(" mtz_1_2: u_1 - u_2 + 1 x_1_1_1_2_1_1 <= 0\n"),
            std::string::npos);
  EXPECT_NE(lp.find(" mtz_2_1: u_2 - u_1 <= 1\n"), std::string::npos);
  EXPECT_NE(lp.find(" u_1 = 1\n"), std::string::npos);
  EXPECT_NE(lp.find(" 2 <= u_2 <= 2\n"), std::string::npos);
  EXPECT_EQ(lp.substr(lp.size() - 4), "End\n");
}

TEST(ExportMilpTest, RowAndVariableCounts) {
  for (const auto [n, h, v] : {std::tuple{3, 1, 1}, std::tuple{4, 2, 2},
                              std::tuple{6, 2, 2}, std::tuple{5, 3, 1}}) {
    Scenario sc = RandomScenario(n * 100 + h * 10 + v, n, h, v == 1 ? 2 : v);
    CostMatrix m = sc.matrix;
    if (v == 1) {
      m = BuildCostMatrix(sc.instance.locations,
                          Discretization::WithSpeeds(h, {1.0}),
                          AxisLimitPolicy::kPerAxisBox, 2.0, 1.0, 1);
    }
    sc.instance.budget = 20;
    const std::string lp = ExportMilp(sc.instance, m);
    const int hv = h * v;
    EXPECT_EQ(CountRows(lp), 1 + 1 + (n - 1) + (n - 2) * hv + 1 + n * n)
        << n << " " << h << " " << v;
    // Arcs: no self-loops, none into the start or out of the end.
    const int arcs = ((n - 1) * (n - 1) - (n - 2)) * hv * hv;
    EXPECT_EQ(static_cast<int>(SectionLines(lp, "Binaries").size()), arcs);
    EXPECT_EQ(static_cast<int>(SectionLines(lp, "Generals").size()), n);
    EXPECT_EQ(static_cast<int>(SectionLines(lp, "Bounds").size()), n);
    EXPECT_EQ(lp.find(std::string("_") + std::to_string(n) + "_1_1_1_1_1 "),
              std::string::npos);
  }
}

TEST(SolutionJsonTest, RoundTrip) {
  Scenario sc = RandomScenario(8, 5, 2, 2);
  sc.instance.budget = 1e6;
  const Solution sol = SolveExact(sc.instance, sc.matrix);
  SolutionMetadata meta;
  meta.instance = "random8";
  meta.seed = 42;
  meta.cmax = 1e6;
  meta.vmax = 2;
  meta.amax = 1;
  meta.headings = 2;
  meta.speeds = 2;
  meta.policy = "box";
  meta.speed_values = {0.0, 2.0};
  const std::string text = SolutionToJson(sol, meta);
  SolutionMetadata back_meta;
  const Solution back = SolutionFromJson(text, &back_meta);
  EXPECT_EQ(back.tour, sol.tour);
  EXPECT_EQ(back.leg_durations, sol.leg_durations);
  EXPECT_EQ(back.total_time, sol.total_time);
  EXPECT_EQ(back.objective, sol.objective);
  EXPECT_EQ(back_meta.seed, 42u);
  EXPECT_EQ(back_meta.policy, "box");
  EXPECT_EQ(back_meta.speed_values, meta.speed_values);
  EXPECT_EQ(SolutionToJson(back, back_meta), text);
  EXPECT_LT(text.find("\"instance\""), text.find("\"visits\""));
  EXPECT_THROW(SolutionFromJson("{\"visits\": 3}"), Error);
  EXPECT_THROW(SolutionFromJson("not json"), Error);
}

}  // namespace
}  // namespace kopkit
