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

// Dubins shortest paths, used as the constant-speed baseline.

#ifndef KOPKIT_DUBINS_H_
#define KOPKIT_DUBINS_H_

#include <array>
#include <span>

#include "kopkit/steering_cost.h"

namespace kopkit {

struct DubinsConfig {
  DubinsConfig() = default;
  // theta is normalized to [0, 2*pi).
  DubinsConfig(double x, double y, double theta);

  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

enum class DubinsWord { kLSL, kRSR, kLSR, kRSL, kRLR, kLRL };

const char* DubinsWordName(DubinsWord word);

struct DubinsPath {
  DubinsWord word = DubinsWord::kLSL;
  std::array<double, 3> segment_lengths{};  // metres
  double total_length = 0.0;
  double radius = 0.0;
};

// Minimum turning radius at constant speed under a lateral acceleration
// bound: v^2 / a.
double TurningRadius(double v_const, double a_max);

// Shortest of the six Dubins words; ties resolved in enumeration order.
DubinsPath ShortestPath(const DubinsConfig& q0, const DubinsConfig& q1,
                        double radius);

// Flight time along the shortest path at constant speed.
double DopLegCost(const DubinsConfig& q0, const DubinsConfig& q1,
                  double v_const, double a_max);

// Cost matrix over (location, heading) states with a single speed entry
// holding v_const. Headings follow Discretization::heading_angle().
CostMatrix BuildDubinsCostMatrix(std::span<const Location> locations,
                                 int headings, double v_const, double a_max,
                                 int workers = 0);

}  // namespace kopkit

#endif  // KOPKIT_DUBINS_H_
