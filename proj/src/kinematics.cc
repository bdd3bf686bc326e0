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

#include "kopkit/kinematics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "kopkit/error.h"

namespace kopkit {
namespace {

// Relative slack used to snap a slightly negative discriminant to zero.
constexpr double kDiscriminantRelTolerance = 1e-12;

struct ClassicalTerms {
  double discriminant;
  double scale;
};

ClassicalTerms Discriminant(const AxisBoundary& axis, double a, double T) {
  const double dv = axis.v_e - axis.v_s;
  const double sv = axis.v_e + axis.v_s;
  const double d = axis.displacement();
  const double t_a = a * a * T * T;
  const double t_b = 2.0 * sv * a * T;
  const double t_c = 4.0 * a * d;
  const double t_d = dv * dv;
  return {t_a + t_b - t_c - t_d,
          t_a + std::abs(t_b) + std::abs(t_c) + t_d};
}

PatternSolution ClassicalBranch(const AxisBoundary& axis, double a, double T,
                                double sigma_sqrt) {
  const double dv = axis.v_e - axis.v_s;
  PatternSolution sol;
  sol.kind = a > 0 ? PatternKind::kClassicalAccFirst
                   : PatternKind::kClassicalDecFirst;
  sol.a = a;
  sol.t1 = (a * T + dv + sigma_sqrt) / (2.0 * a);
  sol.t2 = -sigma_sqrt / a;
  sol.t3 = (a * T - dv + sigma_sqrt) / (2.0 * a);
  // Recomputed per branch; the printed closed form carries a fixed sign.
  sol.v_c = axis.v_s + a * sol.t1;
  return sol;
}

PatternSolution Clamped(PatternSolution sol) {
  sol.t1 = std::max(sol.t1, 0.0);
  sol.t2 = std::max(sol.t2, 0.0);
  sol.t3 = std::max(sol.t3, 0.0);
  return sol;
}

void AddRoot(double root, std::vector<double>* out) {
  if (!std::isfinite(root)) return;
  if (root < -kCandidateMergeTolerance) return;
  out->push_back(std::max(root, 0.0));
}

// Real roots of q2*T^2 + q1*T + q0 = 0 (degree drops when q2 == 0).
void AddPolynomialRoots(double q2, double q1, double q0,
                        std::vector<double>* out) {
  if (q2 == 0.0) {
    if (q1 != 0.0) AddRoot(-q0 / q1, out);
    return;
  }
  double disc = q1 * q1 - 4.0 * q2 * q0;
  const double scale = q1 * q1 + std::abs(4.0 * q2 * q0);
  if (disc < 0.0) {
    if (disc < -kDiscriminantRelTolerance * std::max(1.0, scale)) return;
    disc = 0.0;
  }
  // Cancellation-free form.
  const double s = std::sqrt(disc);
  const double q = -0.5 * (q1 + std::copysign(s, q1));
  if (q != 0.0) {
    AddRoot(q / q2, out);
    AddRoot(q0 / q, out);
  } else {
    AddRoot(0.0, out);
  }
}

enum class Condition { kT1Zero, kT3Zero, kCruiseAt };

// Whether some classical branch at T satisfies the condition to within the
// root filter tolerance. Guards against roots introduced by squaring.
bool ClassicalConditionHolds(const AxisBoundary& axis, double a, double T,
                             Condition condition, double bound) {
  const ClassicalTerms terms = Discriminant(axis, a, T);
  const double tol_a =
      kRootFilterTolerance * std::max(1.0, terms.scale);
  if (terms.discriminant < -tol_a) return false;
  const double s = std::sqrt(std::max(terms.discriminant, 0.0));
  for (const double sigma : {1.0, -1.0}) {
    const PatternSolution sol = ClassicalBranch(axis, a, T, sigma * s);
    double residual = 0.0;
    switch (condition) {
      case Condition::kT1Zero:
        residual = sol.t1;
        break;
      case Condition::kT3Zero:
        residual = sol.t3;
        break;
      case Condition::kCruiseAt:
        residual = sol.v_c - bound;
        break;
    }
    if (std::abs(residual) <= kRootFilterTolerance) return true;
  }
  return false;
}

void ClassicalCandidates(const AxisBoundary& axis, const KinematicLimits& lim,
                         double a, std::vector<double>* out) {
  const double d = axis.displacement();
  const double dv = axis.v_e - axis.v_s;
  const double sv = axis.v_e + axis.v_s;

  // t2 = 0  <=>  discriminant(T) = 0.
  AddPolynomialRoots(a * a, 2.0 * sv * a, -(4.0 * a * d + dv * dv), out);

  std::vector<double> squared;
  auto filtered = [&](Condition condition, double bound) {
    for (const double root : squared) {
      if (ClassicalConditionHolds(axis, a, root, condition, bound)) {
        out->push_back(root);
      }
    }
    squared.clear();
  };

  // t1 = 0 after squaring: 4 a v_s T = 4 a d + 2 dv^2.
  AddPolynomialRoots(0.0, 4.0 * a * axis.v_s, -(4.0 * a * d + 2.0 * dv * dv),
                     &squared);
  filtered(Condition::kT1Zero, 0.0);
  // t3 = 0 after squaring: 4 a v_e T = 4 a d + 2 dv^2.
  AddPolynomialRoots(0.0, 4.0 * a * axis.v_e, -(4.0 * a * d + 2.0 * dv * dv),
                     &squared);
  filtered(Condition::kT3Zero, 0.0);
  // v_c = v_b after squaring: 4 a v_b T = 4 a d + dv^2 + w^2.
  for (const double vb : {lim.v_min(), lim.v_max()}) {
    const double w = 2.0 * vb - sv;
    AddPolynomialRoots(0.0, 4.0 * a * vb, -(4.0 * a * d + dv * dv + w * w),
                       &squared);
    filtered(Condition::kCruiseAt, vb);
  }
}

void SyncCandidates(const AxisBoundary& axis, const KinematicLimits& lim,
                    double a, std::vector<double>* out) {
  const double dv = axis.v_e - axis.v_s;
  const double numerator = 2.0 * a * axis.displacement() -
                           axis.v_e * axis.v_e + axis.v_s * axis.v_s;
  // t2 = 0.
  AddRoot(dv / a, out);
  // v_c(T) = numerator / (2 (aT - dv)) equals v for t1 = 0 (v = v_s),
  // t3 = 0 (v = v_e) and the two velocity bounds.
  for (const double v : {axis.v_s, axis.v_e, lim.v_min(), lim.v_max()}) {
    if (v == 0.0) continue;
    AddRoot((numerator / (2.0 * v) + dv) / a, out);
  }
}

struct AxisAnalysis {
  std::vector<double> candidates;
  double optimum;
};

AxisAnalysis Analyze(const AxisBoundary& axis, const KinematicLimits& limits) {
  AxisAnalysis result{CandidateTimes(axis, limits), 0.0};
  if (axis.displacement() == 0.0 && axis.v_s == 0.0 && axis.v_e == 0.0) {
    return result;
  }
  for (const double T : result.candidates) {
    if (AxisFeasibleAt(axis, limits, T)) {
      result.optimum = T;
      return result;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "no candidate duration is feasible for axis (" << axis.p_s << ", "
      << axis.v_s << ", " << axis.p_e << ", " << axis.v_e << ")";
  throw Error(ErrorCode::kNoFeasibleDuration, msg.str());
}

}  // namespace

KinematicLimits::KinematicLimits(double a_max, double v_min, double v_max)
    : a_max_(a_max), v_min_(v_min), v_max_(v_max) {
  if (!(a_max > 0.0) || !std::isfinite(a_max)) {
    throw Error(ErrorCode::kInvalidArgument, "a_max must be positive");
  }
  if (!(v_min < v_max)) {
    throw Error(ErrorCode::kInvalidArgument, "v_min must be below v_max");
  }
}

const char* PatternKindName(PatternKind kind) {
  switch (kind) {
    case PatternKind::kClassicalAccFirst:
      return "ClassicalAccFirst";
    case PatternKind::kClassicalDecFirst:
      return "ClassicalDecFirst";
    case PatternKind::kSyncPositive:
      return "SyncPositive";
    case PatternKind::kSyncNegative:
      return "SyncNegative";
  }
  return "Unknown";
}

AxisState EvaluateProfile(const PatternSolution& sol, const AxisBoundary& axis,
                          double t) {
  t = std::clamp(t, 0.0, sol.duration());
  const double a1 = sol.a;
  const double a3 = sol.third_acceleration();
  if (t < sol.t1) {
    return {axis.p_s + axis.v_s * t + 0.5 * a1 * t * t, axis.v_s + a1 * t,
            a1};
  }
  const double p1 = axis.p_s + axis.v_s * sol.t1 + 0.5 * a1 * sol.t1 * sol.t1;
  const double v1 = axis.v_s + a1 * sol.t1;
  if (t < sol.t1 + sol.t2) {
    return {p1 + v1 * (t - sol.t1), v1, 0.0};
  }
  const double p2 = p1 + v1 * sol.t2;
  const double tau = t - sol.t1 - sol.t2;
  // The last segment keeps its acceleration at t == T.
  return {p2 + v1 * tau + 0.5 * a3 * tau * tau, v1 + a3 * tau,
          sol.t3 > 0.0 ? a3 : (sol.t2 > 0.0 ? 0.0 : a1)};
}

std::vector<PatternSolution> SolveClassical(const AxisBoundary& axis,
                                            double a, double duration) {
  ClassicalTerms terms = Discriminant(axis, a, duration);
  if (terms.discriminant < 0.0) {
    if (terms.discriminant <
        -kDiscriminantRelTolerance * std::max(1.0, terms.scale)) {
      return {};
    }
    terms.discriminant = 0.0;
  }
  const double s = std::sqrt(terms.discriminant);
  std::vector<PatternSolution> out;
  out.push_back(ClassicalBranch(axis, a, duration, s));
  if (s > 0.0) out.push_back(ClassicalBranch(axis, a, duration, -s));
  return out;
}

std::optional<PatternSolution> SolveSync(const AxisBoundary& axis, double a,
                                         double duration) {
  const double dv = axis.v_e - axis.v_s;
  const double denominator = a * duration - dv;
  if (std::abs(denominator) <=
      kDiscriminantRelTolerance *
          std::max(1.0, std::abs(a * duration) + std::abs(dv))) {
    return std::nullopt;
  }
  PatternSolution sol;
  sol.kind = a > 0 ? PatternKind::kSyncPositive : PatternKind::kSyncNegative;
  sol.a = a;
  sol.t2 = denominator / a;
  sol.v_c = (2.0 * a * axis.displacement() - axis.v_e * axis.v_e +
             axis.v_s * axis.v_s) /
            (2.0 * denominator);
  // Derived from the cruise velocity rather than transcribed; see README.
  sol.t1 = (sol.v_c - axis.v_s) / a;
  sol.t3 = (axis.v_e - sol.v_c) / a;
  return sol;
}

bool IsFeasible(const PatternSolution& sol, const KinematicLimits& limits) {
  return sol.t1 >= -kDurationEpsilon && sol.t2 >= -kDurationEpsilon &&
         sol.t3 >= -kDurationEpsilon &&
         sol.v_c >= limits.v_min() - kVelocityEpsilon &&
         sol.v_c <= limits.v_max() + kVelocityEpsilon;
}

std::optional<PatternSolution> AxisFeasibleAt(const AxisBoundary& axis,
                                              const KinematicLimits& limits,
                                              double duration) {
  if (duration < 0.0) return std::nullopt;
  const std::array<double, 2> accelerations = {limits.a_max(),
                                               -limits.a_max()};
  for (const double a : accelerations) {
    for (const PatternSolution& sol : SolveClassical(axis, a, duration)) {
      if (IsFeasible(sol, limits)) return Clamped(sol);
    }
  }
  for (const double a : accelerations) {
    const auto sol = SolveSync(axis, a, duration);
    if (sol && IsFeasible(*sol, limits)) return Clamped(*sol);
  }
  return std::nullopt;
}

std::vector<double> CandidateTimes(const AxisBoundary& axis,
                                   const KinematicLimits& limits) {
  std::vector<double> out;
  out.reserve(24);
  for (const double a : {limits.a_max(), -limits.a_max()}) {
    ClassicalCandidates(axis, limits, a, &out);
    SyncCandidates(axis, limits, a, &out);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  merged.reserve(out.size());
  for (const double t : out) {
    if (merged.empty() || t - merged.back() > kCandidateMergeTolerance) {
      merged.push_back(t);
    }
  }
  return merged;
}

double AxisTimeOptimal(const AxisBoundary& axis,
                       const KinematicLimits& limits) {
  if (axis.displacement() == 0.0 && axis.v_s == 0.0 && axis.v_e == 0.0) {
    return 0.0;
  }
  return Analyze(axis, limits).optimum;
}

SyncResult OptimalSyncTime(std::span<const AxisBoundary> axes,
                           std::span<const KinematicLimits> limits) {
  if (axes.empty() || axes.size() != limits.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need one limit per axis and at least one axis");
  }
  std::vector<AxisAnalysis> analyses;
  analyses.reserve(axes.size());
  double lower = 0.0;
  for (size_t i = 0; i < axes.size(); ++i) {
    analyses.push_back(Analyze(axes[i], limits[i]));
    lower = std::max(lower, analyses.back().optimum);
  }

  SyncResult result;
  result.per_axis.reserve(axes.size());
  auto try_duration = [&](double T) {
    result.per_axis.clear();
    for (size_t i = 0; i < axes.size(); ++i) {
      auto sol = AxisFeasibleAt(axes[i], limits[i], T);
      if (!sol) return false;
      result.per_axis.push_back(*sol);
    }
    result.duration = T;
    return true;
  };

  if (try_duration(lower)) return result;

  std::vector<double> candidates;
  for (const AxisAnalysis& analysis : analyses) {
    for (const double t : analysis.candidates) {
      if (t > lower) candidates.push_back(t);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const double T : candidates) {
    if (try_duration(T)) return result;
  }
  throw Error(ErrorCode::kNoCommonDuration,
              "candidate scan exhausted without a common duration");
}

std::vector<TrajectorySample> SampleTrajectory(
    const SyncResult& result, std::span<const AxisBoundary> axes, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  }
  if (axes.size() != result.per_axis.size()) {
    throw Error(ErrorCode::kInvalidArgument, "axis count mismatch");
  }
  const double total = result.duration;
  std::vector<double> times;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= total - 1e-12) break;
    times.push_back(t);
  }
  times.push_back(total);

  std::vector<TrajectorySample> samples;
  samples.reserve(times.size());
  for (const double t : times) {
    TrajectorySample sample;
    sample.t = t;
    for (size_t i = 0; i < axes.size(); ++i) {
      const AxisState s = EvaluateProfile(result.per_axis[i], axes[i], t);
      sample.position.push_back(s.position);
      sample.velocity.push_back(s.velocity);
      sample.acceleration.push_back(s.acceleration);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace kopkit
