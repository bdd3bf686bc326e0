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
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "kopkit/error.h"

namespace kopkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool ParseNumber(std::string_view field, double* out) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), *out);
  return ec == std::errc() && ptr == field.data() + field.size() &&
         std::isfinite(*out);
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Appends `+ coef name` terms to an LP row, wrapping long rows.
class LpRow {
 public:
  explicit LpRow(std::ostringstream& out) : out_(out) {}

  void Add(double coef, const std::string& name) {
    if (terms_ > 0 && terms_ % 6 == 0) out_ << "\n   ";
    if (coef < 0) {
      out_ << " - " << FormatNumber(-coef) << ' ' << name;
    } else {
      out_ << " + " << FormatNumber(coef) << ' ' << name;
    }
    ++terms_;
  }
  void AddUnit(int sign, const std::string& name) {
    if (terms_ > 0 && terms_ % 6 == 0) out_ << "\n   ";
    out_ << (sign < 0 ? " - " : " + ") << name;
    ++terms_;
  }
  int terms() const { return terms_; }

 private:
  std::ostringstream& out_;
  int terms_ = 0;
};

class ExactSearch {
 public:
  ExactSearch(const Instance& instance, const CostMatrix& matrix)
      : instance_(instance),
        matrix_(matrix),
        n_(instance.size()),
        states_(matrix.states_per_location()),
        limit_(instance.budget + kBudgetTolerance),
        end_reward_(instance.locations.back().priority) {
    const int interior = n_ - 2;
    if (interior <= 20) {
      const std::size_t cells = (std::size_t{1} << interior) *
                                static_cast<std::size_t>(n_) * states_;
      if (cells <= (std::size_t{1} << 26)) memo_.assign(cells, kInf);
    }
  }

  void Run(std::span<const int> start_states) {
    double pending = 0.0;
    for (int p = 1; p < n_ - 1; ++p) pending += instance_.locations[p].priority;
    for (const int s : start_states) {
      path_.assign(1, PoseState{0, s / matrix_.speeds(), s % matrix_.speeds()});
      Visit(0, s, 0, 0.0, 0.0, pending);
    }
  }

  bool found() const { return !best_.empty(); }
  const Tour& best() const { return best_; }

 private:
  void Visit(int loc, int s, std::uint32_t mask, double time, double reward,
             double pending) {
    if (!memo_.empty()) {
      const std::size_t key =
          (static_cast<std::size_t>(mask) * n_ + loc) * states_ + s;
      if (time >= memo_[key]) return;
      memo_[key] = time;
    }
    if (found() && reward + pending + end_reward_ <= best_objective_) return;

    for (int j = 1; j < n_ - 1; ++j) {
      const std::uint32_t bit = std::uint32_t{1} << (j - 1);
      if (mask & bit) continue;
      const double r = instance_.locations[j].priority;
      for (int t = 0; t < states_; ++t) {
        const double next = time + matrix_.at(loc, s, j, t);
        if (!(next <= limit_)) continue;
        path_.push_back({j, t / matrix_.speeds(), t % matrix_.speeds()});
        Visit(j, t, mask | bit, next, reward + r, pending - r);
        path_.pop_back();
      }
    }
    const int end = n_ - 1;
    for (int t = 0; t < states_; ++t) {
      const double next = time + matrix_.at(loc, s, end, t);
      if (!(next <= limit_)) continue;
      const double objective = reward + end_reward_;
      if (!found() || objective > best_objective_) {
        best_objective_ = objective;
        best_ = path_;
        best_.push_back({end, t / matrix_.speeds(), t % matrix_.speeds()});
      }
    }
  }

  const Instance& instance_;
  const CostMatrix& matrix_;
  int n_;
  int states_;
  double limit_;
  double end_reward_;
  // Least arrival time seen per (visited set, location, state).
  std::vector<double> memo_;
  Tour path_;
  Tour best_;
  double best_objective_ = -kInf;
};

std::string ArcName(int i, int s, int j, int t, int speeds) {
  std::ostringstream name;
  name << "x_" << i + 1 << '_' << s / speeds + 1 << '_' << s % speeds + 1
       << '_' << j + 1 << '_' << t / speeds + 1 << '_' << t % speeds + 1;
  return name.str();
}

std::string UName(int i) { return "u_" + std::to_string(i + 1); }

}  // namespace

Instance ParseInstance(std::string_view text, std::string name,
                       std::vector<std::string>* warnings) {
  struct Row {
    int line;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto fields = SplitFields(line);
    if (fields.empty()) continue;
    Row row{line_no, {}};
    for (const auto f : fields) {
      double v;
      if (!ParseNumber(f, &v)) {
        throw MalformedLineError(line_no,
                                 "not a number: '" + std::string(f) + "'");
      }
      row.values.push_back(v);
    }
    rows.push_back(std::move(row));
    if (eol == text.size()) break;
  }

  std::size_t first = 0;
  if (!rows.empty() && rows[0].values.size() == 2 && rows.size() > 1) {
    if (warnings) {
      warnings->push_back("line " + std::to_string(rows[0].line) +
                          ": ignoring leading budget pair");
    }
    first = 1;
  }
  std::vector<Location> locations;
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (rows[r].values.size() != 3) {
      throw MalformedLineError(rows[r].line, "expected 'x y score'");
    }
    locations.push_back({rows[r].values[0], rows[r].values[1], rows[r].values[2]});
  }
  if (locations.size() < 2) {
    throw Error(ErrorCode::kFewerThanTwoLocations,
                "an instance needs a start and an end depot");
  }
  std::rotate(locations.begin() + 1, locations.begin() + 2, locations.end());
  if (warnings) {
    if (locations.front().priority != 0.0) {
      warnings->push_back("start depot has a nonzero score");
    }
    if (locations.back().priority != 0.0) {
      warnings->push_back("end depot has a nonzero score");
    }
  }
  Instance instance;
  instance.name = std::move(name);
  instance.locations = std::move(locations);
  return instance;
}

Instance LoadInstance(const std::string& path,
                      std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseInstance(text.str(), std::filesystem::path(path).stem().string(),
                       warnings);
}

Solution Evaluate(const Tour& tour, const CostMatrix& matrix,
                  const Instance& instance) {
  Solution sol;
  sol.tour = tour;
  for (std::size_t k = 1; k < tour.size(); ++k) {
    const double c = matrix(tour[k - 1], tour[k]);
    sol.leg_durations.push_back(c);
    sol.total_time += c;
    sol.objective += instance.locations[tour[k].location].priority;
  }
  return sol;
}

bool IsFeasible(const Solution& solution, const Instance& instance) {
  const Tour& tour = solution.tour;
  const int n = instance.size();
  if (tour.size() < 2 || tour.front().location != 0 ||
      tour.back().location != n - 1) {
    return false;
  }
  std::vector<bool> seen(n, false);
  for (const PoseState& p : tour) {
    if (p.location < 0 || p.location >= n || seen[p.location]) return false;
    seen[p.location] = true;
  }
  if (solution.leg_durations.size() != tour.size() - 1) return false;
  double sum = 0.0;
  for (const double c : solution.leg_durations) {
    if (!(c >= 0.0)) return false;
    sum += c;
  }
  if (std::abs(sum - solution.total_time) > kBudgetTolerance) return false;
  return solution.total_time <= instance.budget + kBudgetTolerance;
}

const char* StartStatePolicyName(StartStatePolicy policy) {
  return policy == StartStatePolicy::kRest ? "rest" : "free";
}

StartStatePolicy ParseStartStatePolicy(const std::string& name) {
  if (name == "free") return StartStatePolicy::kFree;
  if (name == "rest") return StartStatePolicy::kRest;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown start-state policy '" + name + "'");
}

std::vector<int> AllowedStartStates(StartStatePolicy policy,
                                    const Discretization& disc) {
  std::vector<int> states;
  for (int k = 0; k < disc.headings(); ++k) {
    for (int g = 0; g < disc.speeds(); ++g) {
      if (policy == StartStatePolicy::kFree || disc.speed(g) == 0.0) {
        states.push_back(disc.state_index(k, g));
      }
    }
  }
  if (states.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "start-state policy 'rest' needs a zero speed in the grid");
  }
  return states;
}

Solution SolveExact(const Instance& instance, const CostMatrix& matrix,
                    const ExactOptions& options) {
  const int n = instance.size();
  if (n < 2) {
    throw Error(ErrorCode::kFewerThanTwoLocations,
                "an instance needs a start and an end depot");
  }
  if (matrix.locations() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "cost matrix does not match the instance");
  }
  const int states = matrix.states_per_location();
  if (n > options.max_locations || states > options.max_states) {
    std::ostringstream msg;
    msg << "N = " << n << ", H*V = " << states << " exceeds the guard N <= "
        << options.max_locations << ", H*V <= " << options.max_states;
    throw Error(ErrorCode::kSearchSpaceTooLarge, msg.str());
  }
  std::vector<int> starts = options.start_states;
  if (starts.empty()) {
    for (int s = 0; s < states; ++s) starts.push_back(s);
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  ExactSearch search(instance, matrix);
  search.Run(starts);
  if (!search.found()) {
    throw Error(ErrorCode::kInfeasibleBudget,
                "no tour from start to end depot fits the budget " +
                    FormatNumber(instance.budget));
  }
  return Evaluate(search.best(), matrix, instance);
}

std::string ExportMilp(const Instance& instance, const CostMatrix& matrix) {
  const int n = instance.size();
  const int states = matrix.states_per_location();
  const int speeds = matrix.speeds();
  const int end = n - 1;
  auto has_arcs = [&](int i, int j) { return i != end && j != 0 && i != j; };

  std::ostringstream out;
  out << "\\ Kinematic orienteering model";
  if (!instance.name.empty()) out << " for " << instance.name;
  out << "\n\\ N = " << n << ", H = " << matrix.headings() << ", V = " << speeds
      << ", C_max = " << FormatNumber(instance.budget) << "\n";

  out << "Maximize\n obj:";
  {
    LpRow row(out);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!has_arcs(i, j)) continue;
        const double r = instance.locations[j].priority;
        if (r == 0.0) continue;
        for (int s = 0; s < states; ++s)
          for (int t = 0; t < states; ++t) row.Add(r, ArcName(i, s, j, t, speeds));
      }
    if (row.terms() == 0) row.Add(0.0, ArcName(0, 0, end, 0, speeds));
  }
  out << "\nSubject To\n";

  // Leaves the start depot once.
  out << " start:";
  {
    LpRow row(out);
    for (int j = 1; j < n; ++j)
      for (int s = 0; s < states; ++s)
        for (int t = 0; t < states; ++t)
          row.AddUnit(1, ArcName(0, s, j, t, speeds));
  }
  out << " = 1\n";

  // Enters the end depot once.
  out << " end:";
  {
    LpRow row(out);
    for (int i = 0; i < end; ++i)
      for (int s = 0; s < states; ++s)
        for (int t = 0; t < states; ++t)
          row.AddUnit(1, ArcName(i, s, end, t, speeds));
  }
  out << " = 1\n";

  for (int j = 1; j < n; ++j) {
    out << " visit_" << j + 1 << ':';
    LpRow row(out);
    for (int i = 0; i < end; ++i) {
      if (!has_arcs(i, j)) continue;
      for (int s = 0; s < states; ++s)
        for (int t = 0; t < states; ++t)
          row.AddUnit(1, ArcName(i, s, j, t, speeds));
    }
    out << " <= 1\n";
  }

  // Entered and left in the same pose state.
  for (int j = 1; j < end; ++j) {
    for (int t = 0; t < states; ++t) {
      out << " flow_" << j + 1 << '_' << t / speeds + 1 << '_'
          << t % speeds + 1 << ':';
      LpRow row(out);
      for (int i = 0; i < end; ++i) {
        if (!has_arcs(i, j)) continue;
        for (int s = 0; s < states; ++s)
          row.AddUnit(1, ArcName(i, s, j, t, speeds));
      }
      for (int o = 1; o < n; ++o) {
        if (!has_arcs(j, o)) continue;
        for (int q = 0; q < states; ++q)
          row.AddUnit(-1, ArcName(j, t, o, q, speeds));
      }
      out << " = 0\n";
    }
  }

  out << " budget:";
  {
    LpRow row(out);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!has_arcs(i, j)) continue;
        for (int s = 0; s < states; ++s)
          for (int t = 0; t < states; ++t)
            row.Add(matrix.at(i, s, j, t), ArcName(i, s, j, t, speeds));
      }
  }
  out << " <= " << FormatNumber(instance.budget) << "\n";

  // Miller-Tucker-Zemlin ordering. Pairs without arcs get the relaxed row
  // u_i - u_j <= N - 1, which the bounds already imply.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out << " mtz_" << i + 1 << '_' << j + 1 << ':';
      if (i == j) {
        out << " 0 " << UName(i) << " <= " << n - 1 << "\n";
        continue;
      }
      out << ' ' << UName(i) << " - " << UName(j);
      if (!has_arcs(i, j)) {
        out << " <= " << n - 1 << "\n";
        continue;
      }
      LpRow row(out);
      for (int s = 0; s < states; ++s)
        for (int t = 0; t < states; ++t)
          row.Add(n - 1, ArcName(i, s, j, t, speeds));
      out << " <= " << n - 2 << "\n";
    }
  }

  out << "Bounds\n " << UName(0) << " = 1\n";
  for (int i = 1; i < n; ++i) out << " 2 <= " << UName(i) << " <= " << n << "\n";
  out << "Generals\n";
  for (int i = 0; i < n; ++i) out << ' ' << UName(i) << "\n";
  out << "Binaries\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!has_arcs(i, j)) continue;
      for (int s = 0; s < states; ++s)
        for (int t = 0; t < states; ++t)
          out << ' ' << ArcName(i, s, j, t, speeds) << "\n";
    }
  out << "End\n";
  return out.str();
}

std::string SolutionToJson(const Solution& solution,
                           const SolutionMetadata& meta) {
  nlohmann::ordered_json j;
  j["instance"] = meta.instance;
  j["seed"] = meta.seed;
  nlohmann::ordered_json visits = nlohmann::ordered_json::array();
  for (const PoseState& p : solution.tour) {
    visits.push_back(
        {{"location", p.location}, {"heading_index", p.heading},
         {"speed_index", p.speed}});
  }
  j["visits"] = std::move(visits);
  j["leg_durations"] = solution.leg_durations;
  j["total_time"] = solution.total_time;
  j["objective"] = solution.objective;
  j["config"] = {{"cmax", meta.cmax},
                 {"vmax", meta.vmax},
                 {"amax", meta.amax},
                 {"H", meta.headings},
                 {"V", meta.speeds},
                 {"policy", meta.policy},
                 {"speeds", meta.speed_values},
                 {"start_state", meta.start_state}};
  return j.dump(2) + "\n";
}

Solution SolutionFromJson(const std::string& text, SolutionMetadata* meta) {
  try {
    const auto j = nlohmann::json::parse(text);
    Solution sol;
    for (const auto& v : j.at("visits")) {
      sol.tour.push_back({v.at("location").get<int>(),
                          v.at("heading_index").get<int>(),
                          v.at("speed_index").get<int>()});
    }
    sol.leg_durations = j.at("leg_durations").get<std::vector<double>>();
    sol.total_time = j.at("total_time").get<double>();
    sol.objective = j.at("objective").get<double>();
    if (meta) {
      const auto& c = j.at("config");
      meta->instance = j.at("instance").get<std::string>();
      meta->seed = j.at("seed").get<std::uint64_t>();
      meta->cmax = c.at("cmax").get<double>();
      meta->vmax = c.at("vmax").get<double>();
      meta->amax = c.at("amax").get<double>();
      meta->headings = c.at("H").get<int>();
      meta->speeds = c.at("V").get<int>();
      meta->policy = c.at("policy").get<std::string>();
      meta->speed_values = c.value("speeds", std::vector<double>{});
      meta->start_state = c.value("start_state", std::string("free"));
    }
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("bad solution document: ") + e.what());
  }
}

}  // namespace kopkit
