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

// Discretized (heading, speed) states per location and the dense flight-time
// tensor between them.

#ifndef KOPKIT_STEERING_COST_H_
#define KOPKIT_STEERING_COST_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kopkit/kinematics.h"

namespace kopkit {

struct Location {
  double x = 0.0;
  double y = 0.0;
  double priority = 0.0;

  bool operator==(const Location&) const = default;
};

// Heading k (0-based) maps to the angle 2*pi*(k + 1)/H, so the last heading
// index points along +x. Speeds are an explicit list.
class Discretization {
 public:
  // V >= 2 speeds evenly spaced on [0, v_ref].
  static Discretization Uniform(int headings, int speeds, double v_ref);
  // Explicit speed list, e.g. a single traversal speed for V = 1.
  static Discretization WithSpeeds(int headings, std::vector<double> speeds);

  int headings() const { return headings_; }
  int speeds() const { return static_cast<int>(speed_values_.size()); }
  int states() const { return headings() * speeds(); }
  const std::vector<double>& speed_values() const { return speed_values_; }

  double heading_angle(int k) const;
  double speed(int g) const { return speed_values_.at(g); }

  // State index of (heading, speed) within one location.
  int state_index(int heading, int speed) const {
    return heading * speeds() + speed;
  }

 private:
  Discretization(int headings, std::vector<double> speeds);

  int headings_;
  std::vector<double> speed_values_;
};

struct PoseState {
  int location = 0;
  int heading = 0;
  int speed = 0;

  auto operator<=>(const PoseState&) const = default;
};

enum class AxisLimitPolicy {
  kPerAxisScaled,  // global bounds divided by sqrt(2) on each axis
  kPerAxisBox,     // global bounds used unchanged on each axis
};

const char* AxisLimitPolicyName(AxisLimitPolicy policy);
AxisLimitPolicy ParseAxisLimitPolicy(const std::string& name);

// Per-axis limits derived from global bounds v in [-v_max, v_max] and
// |a| <= a_max.
KinematicLimits PerAxisLimits(AxisLimitPolicy policy, double v_max,
                              double a_max);

// Flight times between every ordered pair of pose states, row-major over
// (i, k, g, j, m, w).
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int locations, int headings, int speeds);

  int locations() const { return locations_; }
  int headings() const { return headings_; }
  int speeds() const { return speeds_; }
  int states_per_location() const { return headings_ * speeds_; }
  std::array<std::uint32_t, 6> dims() const;

  std::size_t offset(int i, int s, int j, int t) const {
    const std::size_t states = states_per_location();
    return ((static_cast<std::size_t>(i) * states + s) * locations_ + j) *
               states +
           t;
  }
  double at(int i, int s, int j, int t) const { return data_[offset(i, s, j, t)]; }
  double& at(int i, int s, int j, int t) { return data_[offset(i, s, j, t)]; }

  int state_of(const PoseState& p) const { return p.heading * speeds_ + p.speed; }
  double operator()(const PoseState& from, const PoseState& to) const {
    return at(from.location, state_of(from), to.location, state_of(to));
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& mutable_data() { return data_; }

 private:
  int locations_ = 0;
  int headings_ = 0;
  int speeds_ = 0;
  std::vector<double> data_;
};

// Boundary problems of the x and y axes for one leg.
std::array<AxisBoundary, 2> StateToAxisBoundaries(
    const PoseState& from, const PoseState& to,
    std::span<const Location> locations, const Discretization& disc);

// Optimal synchronized flight time of one leg; 0 for identical states.
double LegCost(const PoseState& from, const PoseState& to,
               std::span<const Location> locations, const Discretization& disc,
               const std::array<KinematicLimits, 2>& axis_limits);

// Samples the concatenated leg trajectories of a state sequence every `dt`
// seconds. Times are cumulative; each leg after the first drops its initial
// sample, which repeats the previous leg's last one.
std::vector<TrajectorySample> SampleTour(
    std::span<const PoseState> tour, std::span<const Location> locations,
    const Discretization& disc,
    const std::array<KinematicLimits, 2>& axis_limits, double dt);

// Fills all (N*H*V)^2 entries. Speeds must not exceed the per-axis velocity
// bound. Rows are distributed over WorkerCount() threads unless `workers`
// says otherwise.
CostMatrix BuildCostMatrix(std::span<const Location> locations,
                           const Discretization& disc, AxisLimitPolicy policy,
                           double v_max, double a_max, int workers = 0);

// Little-endian dump: six uint32 dimensions then float64 entries.
void WriteCostMatrixBinary(const CostMatrix& matrix, std::ostream& out);
CostMatrix ReadCostMatrixBinary(std::istream& in);
// {"dims": [...], "data": [...]}, intended for small matrices.
std::string CostMatrixToJson(const CostMatrix& matrix);

}  // namespace kopkit

#endif  // KOPKIT_STEERING_COST_H_
