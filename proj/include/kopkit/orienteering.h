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

// Orienteering layer: instances, tours over pose states, evaluation, an exact
// depth-first solver for small instances and LP-format model export.
//
// Location indices are 0-based here: 0 is the start depot and N-1 the end
// depot. The exported model uses the 1-based names of the formulation.

#ifndef KOPKIT_ORIENTEERING_H_
#define KOPKIT_ORIENTEERING_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kopkit/steering_cost.h"

namespace kopkit {

// Slack on budget and total-time comparisons (s).
inline constexpr double kBudgetTolerance = 1e-6;

struct Instance {
  std::string name;
  std::vector<Location> locations;  // start depot first, end depot last
  double budget = 0.0;              // C_max, s

  int size() const { return static_cast<int>(locations.size()); }
  int end_index() const { return size() - 1; }
};

// Parses `x y score` triples. The first triple is the start depot and the
// second the end depot, which is moved to the back. Blank lines and `#`
// comments are skipped. A lone leading `a b` pair (the budget header of the
// original benchmark files) is dropped with a warning when more lines follow.
// The budget is left at 0; callers set it.
Instance ParseInstance(std::string_view text, std::string name = "",
                       std::vector<std::string>* warnings = nullptr);
Instance LoadInstance(const std::string& path,
                      std::vector<std::string>* warnings = nullptr);

// One pose state per visit; the first visit is at location 0 and the last
// at location N-1.
using Tour = std::vector<PoseState>;

struct Solution {
  Tour tour;
  std::vector<double> leg_durations;
  double total_time = 0.0;
  double objective = 0.0;
};

// Leg costs from the matrix and the priority of every visited location
// other than the start depot. Over-budget tours are not rejected.
Solution Evaluate(const Tour& tour, const CostMatrix& matrix,
                  const Instance& instance);

// Anchoring, uniqueness, leg bookkeeping and budget.
bool IsFeasible(const Solution& solution, const Instance& instance);

enum class StartStatePolicy { kFree, kRest };

const char* StartStatePolicyName(StartStatePolicy policy);
StartStatePolicy ParseStartStatePolicy(const std::string& name);

// State indices allowed at the start depot. `kRest` keeps the zero-speed
// states and throws InvalidArgument when the grid has none.
std::vector<int> AllowedStartStates(StartStatePolicy policy,
                                    const Discretization& disc);

struct ExactOptions {
  int max_locations = 9;
  int max_states = 8;  // H * V
  std::vector<int> start_states;  // empty: all
};

// Exhaustive depth-first search. Among optimal tours the lexicographically
// smallest state sequence is returned. Throws SearchSpaceTooLarge past the
// guard and InfeasibleBudget when no tour fits.
Solution SolveExact(const Instance& instance, const CostMatrix& matrix,
                    const ExactOptions& options = {});

// The full binary program in LP text format.
std::string ExportMilp(const Instance& instance, const CostMatrix& matrix);

// Run parameters stored next to a solution.
struct SolutionMetadata {
  std::string instance;
  std::uint64_t seed = 0;
  double cmax = 0.0;
  double vmax = 0.0;
  double amax = 0.0;
  int headings = 0;
  int speeds = 0;
  std::string policy;
  std::vector<double> speed_values;
  std::string start_state = "free";
};

std::string SolutionToJson(const Solution& solution,
                           const SolutionMetadata& meta);
// Throws Io on malformed documents.
Solution SolutionFromJson(const std::string& text,
                          SolutionMetadata* meta = nullptr);

}  // namespace kopkit

#endif  // KOPKIT_ORIENTEERING_H_
