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

#include "kopkit/dubins.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "kopkit/error.h"
#include "kopkit/parallel.h"

namespace kopkit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double Mod2Pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Normalized problem: start at the origin heading alpha, goal at (d, 0)
// heading beta, unit turning radius.
struct Normalized {
  double alpha, beta, d;
  double sa, sb, ca, cb, c_ab;
};

// Segment parameters (in radius units) of one word, if it exists.
std::optional<std::array<double, 3>> WordParams(DubinsWord word,
                                                const Normalized& n) {
  const double d = n.d;
  const double a = n.alpha;
  const double b = n.beta;
  switch (word) {
    case DubinsWord::kLSL: {
      const double p_sq = 2.0 + d * d - 2.0 * n.c_ab + 2.0 * d * (n.sa - n.sb);
      if (p_sq < 0.0) return std::nullopt;
      const double tmp = std::atan2(n.cb - n.ca, d + n.sa - n.sb);
      return std::array<double, 3>{Mod2Pi(tmp - a), std::sqrt(p_sq),
                                   Mod2Pi(b - tmp)};
    }
    case DubinsWord::kRSR: {
      const double p_sq = 2.0 + d * d - 2.0 * n.c_ab + 2.0 * d * (n.sb - n.sa);
      if (p_sq < 0.0) return std::nullopt;
      const double tmp = std::atan2(n.ca - n.cb, d - n.sa + n.sb);
      return std::array<double, 3>{Mod2Pi(a - tmp), std::sqrt(p_sq),
                                   Mod2Pi(tmp - b)};
    }
    case DubinsWord::kLSR: {
      const double p_sq =
          -2.0 + d * d + 2.0 * n.c_ab + 2.0 * d * (n.sa + n.sb);
      if (p_sq < 0.0) return std::nullopt;
      const double p = std::sqrt(p_sq);
      const double tmp = std::atan2(-n.ca - n.cb, d + n.sa + n.sb) -
                         std::atan2(-2.0, p);
      return std::array<double, 3>{Mod2Pi(tmp - a), p, Mod2Pi(tmp - b)};
    }
    case DubinsWord::kRSL: {
      const double p_sq =
          d * d - 2.0 + 2.0 * n.c_ab - 2.0 * d * (n.sa + n.sb);
      if (p_sq < 0.0) return std::nullopt;
      const double p = std::sqrt(p_sq);
      const double tmp = std::atan2(n.ca + n.cb, d - n.sa - n.sb) -
                         std::atan2(2.0, p);
      return std::array<double, 3>{Mod2Pi(a - tmp), p, Mod2Pi(b - tmp)};
    }
    case DubinsWord::kRLR: {
      const double tmp =
          (6.0 - d * d + 2.0 * n.c_ab + 2.0 * d * (n.sa - n.sb)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double phi = std::atan2(n.ca - n.cb, d - n.sa + n.sb);
      const double p = Mod2Pi(kTwoPi - std::acos(tmp));
      const double t = Mod2Pi(a - phi + Mod2Pi(p / 2.0));
      return std::array<double, 3>{t, p, Mod2Pi(a - b - t + Mod2Pi(p))};
    }
    case DubinsWord::kLRL: {
      const double tmp =
          (6.0 - d * d + 2.0 * n.c_ab + 2.0 * d * (n.sb - n.sa)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double phi = std::atan2(n.ca - n.cb, d + n.sa - n.sb);
      const double p = Mod2Pi(kTwoPi - std::acos(tmp));
      const double t = Mod2Pi(-a - phi + p / 2.0);
      return std::array<double, 3>{t, p, Mod2Pi(b - a - t + Mod2Pi(p))};
    }
  }
  return std::nullopt;
}

}  // namespace

DubinsConfig::DubinsConfig(double x_in, double y_in, double theta_in)
    : x(x_in), y(y_in), theta(Mod2Pi(theta_in)) {}

const char* DubinsWordName(DubinsWord word) {
  switch (word) {
    case DubinsWord::kLSL:
      return "LSL";
    case DubinsWord::kRSR:
      return "RSR";
    case DubinsWord::kLSR:
      return "LSR";
    case DubinsWord::kRSL:
      return "RSL";
    case DubinsWord::kRLR:
      return "RLR";
    case DubinsWord::kLRL:
      return "LRL";
  }
  return "?";
}

double TurningRadius(double v_const, double a_max) {
  if (!(v_const > 0.0) || !(a_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "turning radius needs positive speed and acceleration");
  }
  return v_const * v_const / a_max;
}

DubinsPath ShortestPath(const DubinsConfig& q0, const DubinsConfig& q1,
                        double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  const double dx = q1.x - q0.x;
  const double dy = q1.y - q0.y;
  const double dist = std::hypot(dx, dy);
  DubinsPath best;
  best.radius = radius;
  if (dist == 0.0 && Mod2Pi(q1.theta - q0.theta) == 0.0) return best;

  const double phi = dist > 0.0 ? std::atan2(dy, dx) : 0.0;
  Normalized n;
  n.d = dist / radius;
  n.alpha = Mod2Pi(q0.theta - phi);
  n.beta = Mod2Pi(q1.theta - phi);
  n.sa = std::sin(n.alpha);
  n.sb = std::sin(n.beta);
  n.ca = std::cos(n.alpha);
  n.cb = std::cos(n.beta);
  n.c_ab = std::cos(n.alpha - n.beta);

  best.total_length = std::numeric_limits<double>::infinity();
  for (const DubinsWord word :
       {DubinsWord::kLSL, DubinsWord::kRSR, DubinsWord::kLSR,
        DubinsWord::kRSL, DubinsWord::kRLR, DubinsWord::kLRL}) {
    const auto params = WordParams(word, n);
    if (!params) continue;
    const double length = ((*params)[0] + (*params)[1] + (*params)[2]) * radius;
    if (length < best.total_length) {
      best.word = word;
      best.segment_lengths = {(*params)[0] * radius, (*params)[1] * radius,
                              (*params)[2] * radius};
      best.total_length = length;
    }
  }
  return best;
}

double DopLegCost(const DubinsConfig& q0, const DubinsConfig& q1,
                  double v_const, double a_max) {
  return ShortestPath(q0, q1, TurningRadius(v_const, a_max)).total_length /
         v_const;
}

CostMatrix BuildDubinsCostMatrix(std::span<const Location> locations,
                                 int headings, double v_const, double a_max,
                                 int workers) {
  if (locations.size() < 2) {
    throw Error(ErrorCode::kFewerThanTwoLocations,
                "cost matrix needs at least two locations");
  }
  const Discretization disc = Discretization::WithSpeeds(headings, {v_const});
  const double radius = TurningRadius(v_const, a_max);
  const int n = static_cast<int>(locations.size());
  CostMatrix matrix(n, headings, 1);
  ParallelFor(
      static_cast<std::size_t>(n) * headings,
      [&](std::size_t row) {
        const int i = static_cast<int>(row) / headings;
        const int k = static_cast<int>(row) % headings;
        const DubinsConfig from(locations[i].x, locations[i].y,
                                disc.heading_angle(k));
        for (int j = 0; j < n; ++j) {
          for (int m = 0; m < headings; ++m) {
            if (i == j && k == m) continue;
            const DubinsConfig to(locations[j].x, locations[j].y,
                                  disc.heading_angle(m));
            matrix.at(i, k, j, m) =
                ShortestPath(from, to, radius).total_length / v_const;
          }
        }
      },
      workers);
  return matrix;
}

}  // namespace kopkit
