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

// Analytic time-optimal trajectories for decoupled double-integrator axes.
//
// Every axis is driven by a three-segment bang-zero-bang acceleration
// profile. Two families are considered:
//
//   classical:        (+a, 0, -a)   a in {+a_max, -a_max}
//   synchronization:  (+a, 0, +a)   a in {+a_max, -a_max}
//
// A duration T is feasible for an axis if one of the four patterns reaches
// the end state in exactly T with non-negative segment durations and a
// cruise velocity inside [v_min, v_max]. The set of feasible durations of a
// single axis can have gaps, so the maximum of the per-axis optima is not in
// general a common feasible duration. OptimalSyncTime() scans the boundary
// candidates of all axes instead.

#ifndef KOPKIT_KINEMATICS_H_
#define KOPKIT_KINEMATICS_H_

#include <optional>
#include <span>
#include <vector>

namespace kopkit {

// Numerical slack on segment durations (s).
inline constexpr double kDurationEpsilon = 1e-9;
// Numerical slack on the cruise velocity bound (m/s).
inline constexpr double kVelocityEpsilon = 1e-9;
// Two candidate durations closer than this are merged.
inline constexpr double kCandidateMergeTolerance = 1e-9;
// Acceptance tolerance when re-substituting roots of squared conditions.
inline constexpr double kRootFilterTolerance = 1e-7;

// Acceleration and velocity bounds of one axis. Construction validates
// a_max > 0 and v_min < v_max.
class KinematicLimits {
 public:
  KinematicLimits(double a_max, double v_min, double v_max);

  // Limits with velocity bounds [-v_max, v_max].
  static KinematicLimits Symmetric(double a_max, double v_max) {
    return KinematicLimits(a_max, -v_max, v_max);
  }

  double a_max() const { return a_max_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }

  bool operator==(const KinematicLimits&) const = default;

 private:
  double a_max_;
  double v_min_;
  double v_max_;
};

// 1D boundary-value problem: start and end position/velocity of one axis.
struct AxisBoundary {
  double p_s = 0.0;
  double v_s = 0.0;
  double p_e = 0.0;
  double v_e = 0.0;

  double displacement() const { return p_e - p_s; }
  bool operator==(const AxisBoundary&) const = default;
};

enum class PatternKind {
  kClassicalAccFirst,  // (+a, 0, -a), a = +a_max
  kClassicalDecFirst,  // (+a, 0, -a), a = -a_max
  kSyncPositive,       // (+a, 0, +a), a = +a_max
  kSyncNegative,       // (+a, 0, +a), a = -a_max
};

const char* PatternKindName(PatternKind kind);

inline bool IsClassical(PatternKind kind) {
  return kind == PatternKind::kClassicalAccFirst ||
         kind == PatternKind::kClassicalDecFirst;
}

// A solved bang-zero-bang profile. `a` is the signed acceleration of the
// first segment; the third segment applies -a (classical) or +a (sync).
struct PatternSolution {
  PatternKind kind = PatternKind::kClassicalAccFirst;
  double a = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double v_c = 0.0;

  double duration() const { return t1 + t2 + t3; }
  double third_acceleration() const { return IsClassical(kind) ? -a : a; }
};

// Position, velocity and acceleration of one axis at one instant.
struct AxisState {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

// Closed-form evaluation of the profile at time t (clamped to [0, T]).
AxisState EvaluateProfile(const PatternSolution& sol,
                          const AxisBoundary& axis, double t);

struct SyncResult {
  double duration = 0.0;
  std::vector<PatternSolution> per_axis;
};

// Both sign branches of the classical pattern at duration T, or nothing when
// the discriminant is negative. Feasibility is not checked.
std::vector<PatternSolution> SolveClassical(const AxisBoundary& axis,
                                            double a, double duration);

// Synchronization pattern at duration T. Empty when aT == v_e - v_s.
std::optional<PatternSolution> SolveSync(const AxisBoundary& axis, double a,
                                         double duration);

// Non-negative segments and cruise velocity inside the bounds.
bool IsFeasible(const PatternSolution& sol, const KinematicLimits& limits);

// First feasible pattern at T in the fixed order ClassicalAccFirst,
// ClassicalDecFirst, SyncPositive, SyncNegative (+ branch before - branch).
// Reported durations are clamped to >= 0.
std::optional<PatternSolution> AxisFeasibleAt(const AxisBoundary& axis,
                                              const KinematicLimits& limits,
                                              double duration);

// Every non-negative duration at which one synchronization condition of one
// pattern holds with equality. Ascending, deduplicated.
std::vector<double> CandidateTimes(const AxisBoundary& axis,
                                   const KinematicLimits& limits);

// Minimum feasible duration of a single axis. Throws NoFeasibleDuration on
// numerical breakdown.
double AxisTimeOptimal(const AxisBoundary& axis,
                       const KinematicLimits& limits);

// Least duration feasible for every axis, with one profile per axis.
// Throws NoCommonDuration on numerical breakdown.
SyncResult OptimalSyncTime(std::span<const AxisBoundary> axes,
                           std::span<const KinematicLimits> limits);

struct TrajectorySample {
  double t = 0.0;
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> acceleration;
};

// Samples at 0, dt, 2dt, ... and always at the final time.
std::vector<TrajectorySample> SampleTrajectory(
    const SyncResult& result, std::span<const AxisBoundary> axes, double dt);

}  // namespace kopkit

#endif  // KOPKIT_KINEMATICS_H_
