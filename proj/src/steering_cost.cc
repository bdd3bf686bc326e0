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

#include "kopkit/steering_cost.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <type_traits>

#include "json.hpp"
#include "kopkit/error.h"
#include "kopkit/parallel.h"

namespace kopkit {
namespace {

constexpr double kBoundSlack = 1e-9;

double ClampInto(double v, const KinematicLimits& lim) {
  return std::clamp(v, lim.v_min(), lim.v_max());
}

template <typename T>
void PutLittleEndian(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T GetLittleEndian(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::kIo, "truncated cost matrix stream");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

Discretization::Discretization(int headings, std::vector<double> speeds)
    : headings_(headings), speed_values_(std::move(speeds)) {
  if (headings_ < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one heading");
  }
  if (speed_values_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one speed");
  }
  for (const double v : speed_values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "speeds must be finite and non-negative");
    }
  }
}

Discretization Discretization::Uniform(int headings, int speeds,
                                       double v_ref) {
  if (speeds < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "uniform speed grid needs V >= 2; pass the speed explicitly "
                "for V = 1");
  }
  if (!(v_ref > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "v_ref must be positive");
  }
  std::vector<double> values(speeds);
  for (int i = 0; i < speeds; ++i) {
    values[i] = static_cast<double>(i) * v_ref / (speeds - 1);
  }
  return Discretization(headings, std::move(values));
}

Discretization Discretization::WithSpeeds(int headings,
                                          std::vector<double> speeds) {
  return Discretization(headings, std::move(speeds));
}

double Discretization::heading_angle(int k) const {
  return 2.0 * std::numbers::pi * (k + 1) / headings_;
}

const char* AxisLimitPolicyName(AxisLimitPolicy policy) {
  switch (policy) {
    case AxisLimitPolicy::kPerAxisScaled:
      return "scaled";
    case AxisLimitPolicy::kPerAxisBox:
      return "box";
  }
  return "unknown";
}

AxisLimitPolicy ParseAxisLimitPolicy(const std::string& name) {
  if (name == "scaled") return AxisLimitPolicy::kPerAxisScaled;
  if (name == "box") return AxisLimitPolicy::kPerAxisBox;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown axis limit policy '" + name + "'");
}

KinematicLimits PerAxisLimits(AxisLimitPolicy policy, double v_max,
                              double a_max) {
  const double factor =
      policy == AxisLimitPolicy::kPerAxisScaled ? std::numbers::sqrt2 : 1.0;
  return KinematicLimits::Symmetric(a_max / factor, v_max / factor);
}

CostMatrix::CostMatrix(int locations, int headings, int speeds)
    : locations_(locations), headings_(headings), speeds_(speeds) {
  if (locations < 1 || headings < 1 || speeds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cost matrix dims must be >= 1");
  }
  const std::size_t side = static_cast<std::size_t>(locations) * headings *
                           static_cast<std::size_t>(speeds);
  data_.assign(side * side, 0.0);
}

std::array<std::uint32_t, 6> CostMatrix::dims() const {
  const auto n = static_cast<std::uint32_t>(locations_);
  const auto h = static_cast<std::uint32_t>(headings_);
  const auto v = static_cast<std::uint32_t>(speeds_);
  return {n, h, v, n, h, v};
}

std::array<AxisBoundary, 2> StateToAxisBoundaries(
    const PoseState& from, const PoseState& to,
    std::span<const Location> locations, const Discretization& disc) {
  const Location& a = locations[from.location];
  const Location& b = locations[to.location];
  const double h0 = disc.heading_angle(from.heading);
  const double h1 = disc.heading_angle(to.heading);
  const double v0 = disc.speed(from.speed);
  const double v1 = disc.speed(to.speed);
  return {AxisBoundary{a.x, v0 * std::cos(h0), b.x, v1 * std::cos(h1)},
          AxisBoundary{a.y, v0 * std::sin(h0), b.y, v1 * std::sin(h1)}};
}

namespace {

std::array<AxisBoundary, 2> ClampedBoundaries(
    const PoseState& from, const PoseState& to,
    std::span<const Location> locations, const Discretization& disc,
    const std::array<KinematicLimits, 2>& axis_limits) {
  auto axes = StateToAxisBoundaries(from, to, locations, disc);
  for (int i = 0; i < 2; ++i) {
    // cos/sin round-off may push a speed on the bound marginally outside.
    axes[i].v_s = ClampInto(axes[i].v_s, axis_limits[i]);
    axes[i].v_e = ClampInto(axes[i].v_e, axis_limits[i]);
  }
  return axes;
}

}  // namespace

double LegCost(const PoseState& from, const PoseState& to,
               std::span<const Location> locations, const Discretization& disc,
               const std::array<KinematicLimits, 2>& axis_limits) {
  if (from == to) return 0.0;
  const auto axes = ClampedBoundaries(from, to, locations, disc, axis_limits);
  return std::max(0.0, OptimalSyncTime(axes, axis_limits).duration);
}

std::vector<TrajectorySample> SampleTour(
    std::span<const PoseState> tour, std::span<const Location> locations,
    const Discretization& disc,
    const std::array<KinematicLimits, 2>& axis_limits, double dt) {
  std::vector<TrajectorySample> out;
  double offset = 0.0;
  for (std::size_t k = 1; k < tour.size(); ++k) {
    if (tour[k - 1] == tour[k]) continue;
    const auto axes =
        ClampedBoundaries(tour[k - 1], tour[k], locations, disc, axis_limits);
    const SyncResult sync = OptimalSyncTime(axes, axis_limits);
    auto leg = SampleTrajectory(sync, axes, dt);
    for (std::size_t q = out.empty() ? 0 : 1; q < leg.size(); ++q) {
      leg[q].t += offset;
      out.push_back(std::move(leg[q]));
    }
    offset += std::max(0.0, sync.duration);
  }
  return out;
}

CostMatrix BuildCostMatrix(std::span<const Location> locations,
                           const Discretization& disc, AxisLimitPolicy policy,
                           double v_max, double a_max, int workers) {
  if (locations.size() < 2) {
    throw Error(ErrorCode::kFewerThanTwoLocations,
                "cost matrix needs at least two locations");
  }
  const KinematicLimits limits = PerAxisLimits(policy, v_max, a_max);
  for (const double v : disc.speed_values()) {
    if (v > limits.v_max() + kBoundSlack) {
      std::ostringstream msg;
      msg << "speed " << v << " exceeds the per-axis velocity bound "
          << limits.v_max();
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
  const std::array<KinematicLimits, 2> axis_limits = {limits, limits};
  const int n = static_cast<int>(locations.size());
  CostMatrix matrix(n, disc.headings(), disc.speeds());
  const int states = disc.states();

  ParallelFor(
      static_cast<std::size_t>(n) * states,
      [&](std::size_t row) {
        const int i = static_cast<int>(row) / states;
        const int s = static_cast<int>(row) % states;
        const PoseState from{i, s / disc.speeds(), s % disc.speeds()};
        for (int j = 0; j < n; ++j) {
          for (int t = 0; t < states; ++t) {
            const PoseState to{j, t / disc.speeds(), t % disc.speeds()};
            try {
              matrix.at(i, s, j, t) =
                  LegCost(from, to, locations, disc, axis_limits);
            } catch (const Error& e) {
              std::ostringstream msg;
              msg << "leg (" << from.location << "," << from.heading << ","
                  << from.speed << ") -> (" << to.location << ","
                  << to.heading << "," << to.speed << "): " << e.what();
              throw Error(e.code(), msg.str());
            }
          }
        }
      },
      workers);
  return matrix;
}

void WriteCostMatrixBinary(const CostMatrix& matrix, std::ostream& out) {
  for (const std::uint32_t d : matrix.dims()) PutLittleEndian(out, d);
  for (const double v : matrix.data()) PutLittleEndian(out, v);
  if (!out) throw Error(ErrorCode::kIo, "failed to write cost matrix");
}

CostMatrix ReadCostMatrixBinary(std::istream& in) {
  std::array<std::uint32_t, 6> dims;
  for (auto& d : dims) d = GetLittleEndian<std::uint32_t>(in);
  if (dims[0] != dims[3] || dims[1] != dims[4] || dims[2] != dims[5]) {
    throw Error(ErrorCode::kIo, "cost matrix dims are not square");
  }
  CostMatrix matrix(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                    static_cast<int>(dims[2]));
  for (double& v : matrix.mutable_data()) v = GetLittleEndian<double>(in);
  return matrix;
}

std::string CostMatrixToJson(const CostMatrix& matrix) {
  nlohmann::json j;
  j["dims"] = matrix.dims();
  j["data"] = matrix.data();
  return j.dump();
}

}  // namespace kopkit
