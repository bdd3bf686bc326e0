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

#include "kopkit/lns.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "kopkit/error.h"

namespace kopkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Objective differences below this count as ties.
constexpr double kObjectiveTolerance = 1e-9;
// Misfits below this count as optimally configured.
constexpr double kMisfitTolerance = 1e-9;

PoseState StateAt(const CostMatrix& m, int location, int s) {
  return {location, s / m.speeds(), s % m.speeds()};
}

std::vector<int> AllStates(const CostMatrix& m) {
  std::vector<int> states(m.states_per_location());
  std::iota(states.begin(), states.end(), 0);
  return states;
}

double TourTime(const Tour& tour, const CostMatrix& m) {
  double total = 0.0;
  for (std::size_t k = 1; k < tour.size(); ++k) total += m(tour[k - 1], tour[k]);
  return total;
}

// Cost of the legs touching position q when it holds `p`.
double ConnectionCost(const Tour& tour, std::size_t q, const PoseState& p,
                      const CostMatrix& m) {
  double c = 0.0;
  if (q > 0) c += m(tour[q - 1], p);
  if (q + 1 < tour.size()) c += m(p, tour[q + 1]);
  return c;
}

// Re-chooses the states at positions lo..hi jointly, by dynamic programming
// over the chain, with the visits just outside the range fixed. Ties go to
// the lowest state indices, so the result does not depend on the states the
// chain held before.
void ReoptimizeRange(Tour& tour, std::size_t lo, std::size_t hi,
                     const CostMatrix& m, const std::vector<int>& candidates_lo,
                     const std::vector<int>& candidates) {
  const std::size_t len = hi - lo + 1;
  const int states = m.states_per_location();
  auto pose = [&](std::size_t q, int s) {
    return StateAt(m, tour[q].location, s);
  };
  double current = 0.0;
  for (std::size_t q = lo; q <= hi; ++q) {
    if (q > 0) current += m(tour[q - 1], tour[q]);
  }
  if (hi + 1 < tour.size()) current += m(tour[hi], tour[hi + 1]);

  std::vector<double> cost(len * states, kInf);
  std::vector<int> from(len * states, -1);
  for (const int s : lo == 0 ? candidates_lo : candidates) {
    cost[s] = lo > 0 ? m(tour[lo - 1], pose(lo, s)) : 0.0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    for (const int s : candidates) {
      for (int t = 0; t < states; ++t) {
        const double prev = cost[(k - 1) * states + t];
        if (prev == kInf) continue;
        const double c = prev + m(pose(lo + k - 1, t), pose(lo + k, s));
        if (c < cost[k * states + s]) {
          cost[k * states + s] = c;
          from[k * states + s] = t;
        }
      }
    }
  }
  int last = -1;
  double best = kInf;
  for (int s = 0; s < states; ++s) {
    double c = cost[(len - 1) * states + s];
    if (c == kInf) continue;
    if (hi + 1 < tour.size()) c += m(pose(hi, s), tour[hi + 1]);
    if (c < best) {
      best = c;
      last = s;
    }
  }
  if (best > current) return;
  for (std::size_t k = len; k-- > 0;) {
    tour[lo + k] = pose(lo + k, last);
    last = from[k * states + last];
  }
}

// Current and best-possible connection cost of interior position q.
std::pair<double, double> Misfit(const Tour& tour, std::size_t q,
                                 const CostMatrix& m) {
  const double current = ConnectionCost(tour, q, tour[q], m);
  double best = kInf;
  for (int s = 0; s < m.states_per_location(); ++s) {
    best = std::min(best,
                    ConnectionCost(tour, q, StateAt(m, tour[q].location, s), m));
  }
  return {current, best};
}

std::size_t LowestRatioPosition(const Tour& tour, const CostMatrix& m,
                                const Instance& instance) {
  std::size_t pick = 0;
  double pick_ratio = kInf;
  for (std::size_t q = 1; q + 1 < tour.size(); ++q) {
    const double marginal = ConnectionCost(tour, q, tour[q], m) -
                            m(tour[q - 1], tour[q + 1]);
    const double r = instance.locations[tour[q].location].priority;
    const double ratio = marginal > 0.0 ? r / marginal : kInf;
    if (pick == 0 || ratio < pick_ratio ||
        (ratio == pick_ratio && tour[q].location < tour[pick].location)) {
      pick = q;
      pick_ratio = ratio;
    }
  }
  return pick;
}

}  // namespace

const char* EndpointOptName(EndpointOpt opt) {
  switch (opt) {
    case EndpointOpt::kNeighbors:
      return "neighbors";
    case EndpointOpt::kDepots:
      return "depots";
    case EndpointOpt::kOff:
      return "off";
  }
  return "unknown";
}

EndpointOpt ParseEndpointOpt(const std::string& name) {
  if (name == "neighbors") return EndpointOpt::kNeighbors;
  if (name == "depots") return EndpointOpt::kDepots;
  if (name == "off") return EndpointOpt::kOff;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown endpoint optimization '" + name + "'");
}

void LnsConfig::Validate() const {
  if (phase1_iters < 0 || phase2_iters < 0) {
    throw Error(ErrorCode::kInvalidArgument, "iteration counts must be >= 0");
  }
  for (const double f : {phase1_destroy, phase2_destroy}) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "destroy fractions must lie in (0, 1]");
    }
  }
}

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t x = Next();
    if (x >= threshold) return x % n;
  }
}

Rng Rng::Split() {
  // splitmix64 finalizer
  std::uint64_t z = Next() + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

Tour DepotTour(const CostMatrix& matrix, const Instance& instance,
               const std::vector<int>& start_states) {
  const std::vector<int> starts =
      start_states.empty() ? AllStates(matrix) : start_states;
  const int end = instance.end_index();
  Tour best;
  double best_cost = kInf;
  for (const int s : starts) {
    for (int t = 0; t < matrix.states_per_location(); ++t) {
      const double c = matrix.at(0, s, end, t);
      if (c < best_cost) {
        best_cost = c;
        best = {StateAt(matrix, 0, s), StateAt(matrix, end, t)};
      }
    }
  }
  return best;
}

Solution Construct(const Solution& partial, const CostMatrix& matrix,
                   const Instance& instance, const LnsConfig& config) {
  const int n = instance.size();
  const double limit = instance.budget + kBudgetTolerance;
  const std::vector<int> all = AllStates(matrix);
  const std::vector<int>& starts =
      config.start_states.empty() ? all : config.start_states;
  const int states = matrix.states_per_location();

  Tour tour = partial.tour;
  std::vector<bool> scheduled(n, false);
  for (const PoseState& p : tour) scheduled[p.location] = true;
  double total = TourTime(tour, matrix);

  auto reoptimize = [&](std::size_t lo, std::size_t hi) {
    ReoptimizeRange(tour, lo, hi, matrix, starts, all);
  };

  while (true) {
    int pick = -1;
    std::size_t pick_gap = 0;
    int pick_state = 0;
    double pick_delta = kInf;
    double pick_ratio = -kInf;
    for (int p = 1; p < n - 1; ++p) {
      const double r = instance.locations[p].priority;
      if (scheduled[p] || !(r > 0.0)) continue;
      double delta = kInf;
      std::size_t gap = 0;
      int state = 0;
      for (std::size_t g = 0; g + 1 < tour.size(); ++g) {
        const double base = matrix(tour[g], tour[g + 1]);
        for (int s = 0; s < states; ++s) {
          const PoseState ps = StateAt(matrix, p, s);
          const double d = matrix(tour[g], ps) + matrix(ps, tour[g + 1]) - base;
          if (d < delta) {
            delta = d;
            gap = g;
            state = s;
          }
        }
      }
      if (!(total + delta <= limit)) continue;
      const double ratio = delta > 0.0 ? r / delta : kInf;
      if (ratio > pick_ratio ||
          (ratio == kInf && pick_ratio == kInf && delta < pick_delta)) {
        pick = p;
        pick_gap = gap;
        pick_state = state;
        pick_delta = delta;
        pick_ratio = ratio;
      }
    }
    if (pick < 0) break;

    tour.insert(tour.begin() + static_cast<std::ptrdiff_t>(pick_gap) + 1,
                StateAt(matrix, pick, pick_state));
    scheduled[pick] = true;
    switch (config.endpoint_opt) {
      case EndpointOpt::kNeighbors:
        reoptimize(pick_gap, pick_gap + 2);
        break;
      case EndpointOpt::kDepots:
        reoptimize(0, 0);
        reoptimize(tour.size() - 1, tour.size() - 1);
        break;
      case EndpointOpt::kOff:
        break;
    }
    total = TourTime(tour, matrix);
  }
  return Evaluate(tour, matrix, instance);
}

int RemoveOne(Tour& tour, RemovalRule rule, const CostMatrix& matrix,
              const Instance& instance) {
  if (tour.size() <= 2) return -1;
  std::size_t pick = 0;
  if (rule == RemovalRule::kLargestMisfit) {
    double pick_gap = -kInf;
    for (std::size_t q = 1; q + 1 < tour.size(); ++q) {
      const auto [current, best] = Misfit(tour, q, matrix);
      const double gap = current - best;
      if (gap > pick_gap ||
          (gap == pick_gap && tour[q].location < tour[pick].location)) {
        pick = q;
        pick_gap = gap;
      }
    }
  } else if (rule == RemovalRule::kLowestMisfitRatio) {
    double pick_ratio = kInf;
    for (std::size_t q = 1; q + 1 < tour.size(); ++q) {
      const auto [current, best] = Misfit(tour, q, matrix);
      const double gap = current - best;
      if (!(gap > kMisfitTolerance)) continue;
      const double ratio = instance.locations[tour[q].location].priority / gap;
      if (pick == 0 || ratio < pick_ratio ||
          (ratio == pick_ratio && tour[q].location < tour[pick].location)) {
        pick = q;
        pick_ratio = ratio;
      }
    }
    if (pick == 0) pick = LowestRatioPosition(tour, matrix, instance);
  } else {
    pick = LowestRatioPosition(tour, matrix, instance);
  }
  const int removed = tour[pick].location;
  tour.erase(tour.begin() + static_cast<std::ptrdiff_t>(pick));
  return removed;
}

Solution Destroy(const Solution& solution, double fraction,
                 const CostMatrix& matrix, const Instance& instance, Rng& rng) {
  Tour tour = solution.tour;
  const int interior = static_cast<int>(tour.size()) - 2;
  // The small offset keeps products like 0.7 * 10 from rounding up.
  const int count = std::min(
      interior, static_cast<int>(std::ceil(fraction * interior - 1e-9)));
  for (int k = 0; k < count; ++k) {
    const auto rule = static_cast<RemovalRule>(rng.Below(3));
    RemoveOne(tour, rule, matrix, instance);
  }
  return Evaluate(tour, matrix, instance);
}

Solution SolveLns(const Instance& instance, const CostMatrix& matrix,
                  const LnsConfig& config, LnsTrace* trace) {
  config.Validate();
  if (matrix.locations() != instance.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cost matrix does not match the instance");
  }
  const Solution depot =
      Evaluate(DepotTour(matrix, instance, config.start_states), matrix,
               instance);
  if (!IsFeasible(depot, instance)) {
    throw Error(ErrorCode::kInfeasibleBudget,
                "the depot-to-depot leg alone exceeds the budget");
  }
  Solution best = Construct(depot, matrix, instance, config);
  if (trace) trace->initial = best;
  Rng rng(config.seed);

  const std::pair<int, double> phases[] = {
      {config.phase1_iters, config.phase1_destroy},
      {config.phase2_iters, config.phase2_destroy}};
  for (const auto& [iters, fraction] : phases) {
    Solution incumbent = best;
    for (int it = 0; it < iters; ++it) {
      Solution destroyed = Destroy(incumbent, fraction, matrix, instance, rng);
      Solution repaired = Construct(destroyed, matrix, instance, config);
      if (repaired.objective > incumbent.objective + kObjectiveTolerance) {
        incumbent = repaired;
        if (incumbent.objective > best.objective + kObjectiveTolerance) {
          best = incumbent;
        }
      }
      if (trace) {
        trace->destroyed.push_back(std::move(destroyed));
        trace->repaired.push_back(std::move(repaired));
        trace->best_objective.push_back(best.objective);
      }
    }
  }
  return best;
}

}  // namespace kopkit
