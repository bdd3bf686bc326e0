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

// Large neighborhood search for the kinematic orienteering problem: greedy
// reward-per-second insertion, three removal rules and a two-phase
// destroy/repair schedule.

#ifndef KOPKIT_LNS_H_
#define KOPKIT_LNS_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kopkit/orienteering.h"

namespace kopkit {

// Which visits get their (heading, speed) re-optimized after an insertion,
// always with the visits around them held fixed.
enum class EndpointOpt {
  kNeighbors,  // predecessor, inserted location and successor, jointly
  kDepots,     // first and last visit of the tour, each on its own
  kOff,
};

const char* EndpointOptName(EndpointOpt opt);
EndpointOpt ParseEndpointOpt(const std::string& name);

struct LnsConfig {
  int phase1_iters = 100;
  double phase1_destroy = 0.5;
  int phase2_iters = 100;
  double phase2_destroy = 0.2;
  std::uint64_t seed = 0;
  EndpointOpt endpoint_opt = EndpointOpt::kNeighbors;
  std::vector<int> start_states;  // empty: all

  // Throws InvalidArgument unless fractions are in (0, 1] and counts >= 0.
  void Validate() const;
};

// Portable seeded generator. Bounded draws use rejection sampling so the
// stream does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  // Independent generator derived from this one's stream.
  Rng Split();

 private:
  std::mt19937_64 engine_;
};

// Depot-to-depot tour with the cheapest allowed start state and end state.
Tour DepotTour(const CostMatrix& matrix, const Instance& instance,
               const std::vector<int>& start_states = {});

// Greedy insertion until nothing fits. Deterministic.
Solution Construct(const Solution& partial, const CostMatrix& matrix,
                   const Instance& instance, const LnsConfig& config);

enum class RemovalRule {
  kLowestRatio = 0,     // lowest score per marginal second
  kLargestMisfit = 1,   // furthest from its best (heading, speed)
  kLowestMisfitRatio = 2,
};

// Removes min(ceil(fraction * interior), interior) interior locations, each
// by a uniformly drawn rule. Marginal costs are recomputed between removals.
Solution Destroy(const Solution& solution, double fraction,
                 const CostMatrix& matrix, const Instance& instance, Rng& rng);

// Single removal by a fixed rule; returns the removed location index.
int RemoveOne(Tour& tour, RemovalRule rule, const CostMatrix& matrix,
              const Instance& instance);

// Per-iteration record of a solve.
struct LnsTrace {
  Solution initial;
  std::vector<Solution> destroyed;     // input to each repair
  std::vector<Solution> repaired;      // output of each repair
  std::vector<double> best_objective;  // after every iteration
};

// Construction, then both phases. Throws InfeasibleBudget when even the
// depot-to-depot tour exceeds the budget.
Solution SolveLns(const Instance& instance, const CostMatrix& matrix,
                  const LnsConfig& config, LnsTrace* trace = nullptr);

}  // namespace kopkit

#endif  // KOPKIT_LNS_H_
