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
#include <cmath>
#include <random>
#include <vector>

#include "feasibility_oracle.h"
#include "gtest/gtest.h"
#include "kopkit/error.h"

namespace kopkit {
namespace {

using ::kopkit::testing::FeasibilityOracle;

constexpr double kTight = 1e-9;
const double kSqrt6 = std::sqrt(6.0);

// Fig. 2 style scenario: a = 0.5 m/s^2, v in [-2, 2] m/s.
const KinematicLimits kFig2Limits = KinematicLimits::Symmetric(0.5, 2.0);
const AxisBoundary kAxisX{0.0, 0.0, 5.0, 2.0};
const AxisBoundary kAxisY{0.0, 2.0, 5.0, 2.0};
// Fig. 4 style scenario with inactive velocity bounds.
const KinematicLimits kFig4Limits = KinematicLimits::Symmetric(0.5, 10.0);
const AxisBoundary kAxisFig4{0.0, 0.0, 1.75, 0.5};

// Independent check of a profile: midpoint integration of the piecewise
// constant acceleration with many steps per segment.
struct Integrated {
  double position;
  double velocity;
};

Integrated IntegrateNumerically(const PatternSolution& sol,
                                const AxisBoundary& axis) {
  const double accel[3] = {sol.a, 0.0, sol.third_acceleration()};
  const double durations[3] = {sol.t1, sol.t2, sol.t3};
  double p = axis.p_s;
  double v = axis.v_s;
  for (int seg = 0; seg < 3; ++seg) {
    constexpr int kSteps = 64;
    const double h = durations[seg] / kSteps;
    for (int k = 0; k < kSteps; ++k) {
      // Exact for constant acceleration over the step.
      p += v * h + 0.5 * accel[seg] * h * h;
      v += accel[seg] * h;
    }
  }
  return {p, v};
}

void ExpectConsistent(const PatternSolution& sol, const AxisBoundary& axis,
                      double duration) {
  EXPECT_NEAR(sol.t1 + sol.t2 + sol.t3, duration, kTight);
  EXPECT_NEAR(sol.v_c, axis.v_s + sol.a * sol.t1, kTight);
  const Integrated end = IntegrateNumerically(sol, axis);
  EXPECT_NEAR(end.velocity, axis.v_e, kTight);
  EXPECT_NEAR(end.position, axis.p_e, kTight);
}

TEST(KinematicLimitsTest, RejectsDegenerateBounds) {
  EXPECT_THROW(KinematicLimits(0.0, -1.0, 1.0), Error);
  EXPECT_THROW(KinematicLimits(-1.0, -1.0, 1.0), Error);
  EXPECT_THROW(KinematicLimits(1.0, 1.0, 1.0), Error);
  EXPECT_NO_THROW(KinematicLimits(1.0, 0.5, 1.0));
}

TEST(SolveClassicalTest, Fig4TimeOptimalProfile) {
  const auto sols = SolveClassical(kAxisFig4, 0.5, 3.0);
  ASSERT_EQ(sols.size(), 1u);  // discriminant is zero, branches coincide
  EXPECT_NEAR(sols[0].t1, 2.0, kTight);
  EXPECT_NEAR(sols[0].t2, 0.0, kTight);
  EXPECT_NEAR(sols[0].t3, 1.0, kTight);
  EXPECT_NEAR(sols[0].v_c, 1.0, kTight);
  ExpectConsistent(sols[0], kAxisFig4, 3.0);
}

TEST(SolveClassicalTest, NullMotionInZeroTime) {
  const auto sols = SolveClassical(AxisBoundary{}, 1.0, 0.0);
  ASSERT_FALSE(sols.empty());
  EXPECT_EQ(sols[0].t1, 0.0);
  EXPECT_EQ(sols[0].t2, 0.0);
  EXPECT_EQ(sols[0].t3, 0.0);
  EXPECT_EQ(sols[0].v_c, 0.0);
}

TEST(SolveClassicalTest, ConstantVelocityLeg) {
  bool found = false;
  for (const double a : {0.5, -0.5}) {
    for (const auto& sol : SolveClassical(kAxisY, a, 2.5)) {
      ExpectConsistent(sol, kAxisY, 2.5);
      if (IsFeasible(sol, kFig2Limits)) {
        EXPECT_NEAR(sol.t1, 0.0, kTight);
        EXPECT_NEAR(sol.t2, 2.5, kTight);
        EXPECT_NEAR(sol.t3, 0.0, kTight);
        EXPECT_NEAR(sol.v_c, 2.0, kTight);
        found = true;
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(SolveClassicalTest, NegativeDiscriminantHasNoSolution) {
  // A = 0.25 * 20.25 - 18 + 10 < 0.
  EXPECT_TRUE(SolveClassical(kAxisY, -0.5, 4.5).empty());
}

TEST(SolveClassicalTest, BranchesSatisfyTheSystem) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  std::uniform_real_distribution<double> dur(0.0, 20.0);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const AxisBoundary axis{pos(rng), vel(rng), pos(rng), vel(rng)};
    const double T = dur(rng);
    for (const double a : {1.3, -1.3}) {
      for (const auto& sol : SolveClassical(axis, a, T)) {
        const double scale = 1.0 + std::abs(a) * T * T;
        EXPECT_NEAR(sol.t1 + sol.t2 + sol.t3, T, 1e-9 * scale);
        EXPECT_NEAR(a * sol.t1 - a * sol.t3, axis.v_e - axis.v_s,
                    1e-9 * scale);
        const Integrated end = IntegrateNumerically(sol, axis);
        EXPECT_NEAR(end.position, axis.p_e, 1e-9 * scale);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(SolveSyncTest, Fig4SynchronizationProfile) {
  const auto sol = SolveSync(kAxisFig4, 0.5, 7.0);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->kind, PatternKind::kSyncPositive);
  EXPECT_NEAR(sol->t1, 0.5, kTight);
  EXPECT_NEAR(sol->t2, 6.0, kTight);
  EXPECT_NEAR(sol->t3, 0.5, kTight);
  EXPECT_NEAR(sol->v_c, 0.25, kTight);
  ExpectConsistent(*sol, kAxisFig4, 7.0);
}

TEST(SolveSyncTest, ConstantVelocityCoincidesWithClassical) {
  const auto sol = SolveSync(kAxisY, 0.5, 2.5);
  ASSERT_TRUE(sol.has_value());
  EXPECT_NEAR(sol->t1, 0.0, kTight);
  EXPECT_NEAR(sol->t2, 2.5, kTight);
  EXPECT_NEAR(sol->t3, 0.0, kTight);
  EXPECT_NEAR(sol->v_c, 2.0, kTight);
}

TEST(SolveSyncTest, UpperBoundaryOfTheGap) {
  const double T = 8.0 + 2.0 * kSqrt6;
  const auto sol = SolveSync(kAxisX, 0.5, T);
  ASSERT_TRUE(sol.has_value());
  // Values frozen from t2 = T - 4, v_c = 1 / (T - 4).
  EXPECT_NEAR(sol->t2, 4.0 + 2.0 * kSqrt6, kTight);
  EXPECT_NEAR(sol->v_c, 1.0 / (4.0 + 2.0 * kSqrt6), kTight);
  EXPECT_NEAR(sol->t1, 0.2247448714, 1e-9);
  EXPECT_NEAR(sol->t3, 3.7752551286, 1e-9);
  ExpectConsistent(*sol, kAxisX, T);
  EXPECT_TRUE(FeasibilityOracle(kAxisX, kFig2Limits, T, 1e-3));
}

TEST(SolveSyncTest, DegenerateDenominator) {
  // aT == v_e - v_s.
  EXPECT_FALSE(SolveSync(AxisBoundary{0.0, 0.0, 1.0, 1.0}, 0.5, 2.0));
}

TEST(IsFeasibleTest, Conditions) {
  const KinematicLimits unit = KinematicLimits::Symmetric(1.0, 1.0);
  PatternSolution at_bound{PatternKind::kClassicalAccFirst, 0.5, 2.0, 0.0,
                           1.0, 1.0};
  EXPECT_TRUE(IsFeasible(at_bound, unit));
  PatternSolution negative = at_bound;
  negative.t1 = -0.22;
  EXPECT_FALSE(IsFeasible(negative, unit));
  PatternSolution too_fast = at_bound;
  too_fast.v_c = 1.0 + 1e-6;
  EXPECT_FALSE(IsFeasible(too_fast, unit));
}

TEST(AxisFeasibleAtTest, Fig2Insynchronizability) {
  EXPECT_FALSE(AxisFeasibleAt(kAxisY, kFig2Limits, 4.5).has_value());
  for (const double a : {0.5, -0.5}) {
    for (const auto& sol : SolveClassical(kAxisY, a, 4.5)) {
      EXPECT_FALSE(IsFeasible(sol, kFig2Limits));
    }
    const auto sync = SolveSync(kAxisY, a, 4.5);
    if (sync) EXPECT_FALSE(IsFeasible(*sync, kFig2Limits));
  }
  const auto at_opt = AxisFeasibleAt(kAxisY, kFig2Limits, 2.5);
  ASSERT_TRUE(at_opt.has_value());
  EXPECT_NEAR(at_opt->t2, 2.5, kTight);
  EXPECT_NEAR(at_opt->v_c, 2.0, kTight);

  const auto late = AxisFeasibleAt(kAxisY, kFig2Limits, 13.0);
  ASSERT_TRUE(late.has_value());
  ExpectConsistent(*late, kAxisY, 13.0);
}

TEST(AxisFeasibleAtTest, DeterministicPatternOrder) {
  // At T = 2.5 the cruise-only profile is reachable from every pattern with
  // zero-length ramps; the first one in the order wins.
  const auto sol = AxisFeasibleAt(kAxisY, kFig2Limits, 2.5);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ(sol->kind, PatternKind::kClassicalAccFirst);
  // At T = 7 on the Fig. 4 axis no classical branch is left.
  const auto late = AxisFeasibleAt(kAxisFig4, kFig4Limits, 7.0);
  ASSERT_TRUE(late.has_value());
  EXPECT_EQ(late->kind, PatternKind::kSyncPositive);
}

TEST(AxisFeasibleAtTest, ClampsTinyNegativeDurations) {
  for (const double T : {2.5, 3.0, 8.0 + 2.0 * kSqrt6, 20.0}) {
    const auto sol = AxisFeasibleAt(kAxisY, kFig2Limits, T);
    if (!sol) continue;
    EXPECT_GE(sol->t1, 0.0);
    EXPECT_GE(sol->t2, 0.0);
    EXPECT_GE(sol->t3, 0.0);
  }
}

bool Contains(const std::vector<double>& v, double x, double tol) {
  return std::any_of(v.begin(), v.end(),
                     [&](double y) { return std::abs(x - y) <= tol; });
}

TEST(CandidateTimesTest, Fig3Boundaries) {
  const auto c = CandidateTimes(kAxisY, kFig2Limits);
  EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
  EXPECT_TRUE(Contains(c, 2.5, 1e-9));
  EXPECT_TRUE(Contains(c, 8.0 - 2.0 * kSqrt6, 1e-9));
  EXPECT_TRUE(Contains(c, 8.0 + 2.0 * kSqrt6, 1e-9));
  for (size_t i = 1; i < c.size(); ++i) {
    EXPECT_GT(c[i] - c[i - 1], kCandidateMergeTolerance);
  }
  for (const double t : c) EXPECT_GE(t, 0.0);
}

TEST(CandidateTimesTest, NullAxisContainsZero) {
  const auto c = CandidateTimes(AxisBoundary{}, kFig2Limits);
  EXPECT_TRUE(Contains(c, 0.0, 1e-12));
}

TEST(CandidateTimesTest, Fig4ContainsOptimumAndPatternSwitch) {
  const auto c = CandidateTimes(kAxisFig4, kFig4Limits);
  EXPECT_TRUE(Contains(c, 3.0, 1e-9));
  EXPECT_TRUE(Contains(c, 4.0, 1e-9));
  // Brute-force cross-check of the optimum on a 1 ms duration grid.
  const double t_min =
      testing::OracleMinimumDuration(kAxisFig4, kFig4Limits, 5.0, 1e-3, 1e-3);
  EXPECT_NEAR(t_min, 3.0, 2e-3);
}

TEST(AxisTimeOptimalTest, Fig2Axes) {
  EXPECT_NEAR(AxisTimeOptimal(kAxisX, kFig2Limits), 4.5, kTight);
  EXPECT_NEAR(AxisTimeOptimal(kAxisY, kFig2Limits), 2.5, kTight);
  EXPECT_EQ(AxisTimeOptimal(AxisBoundary{}, kFig2Limits), 0.0);
}

TEST(AxisTimeOptimalTest, RestToRestBangBang) {
  // Triangular profile: T = 2 sqrt(d / a).
  const KinematicLimits lim = KinematicLimits::Symmetric(2.0, 100.0);
  EXPECT_NEAR(AxisTimeOptimal(AxisBoundary{0.0, 0.0, 8.0, 0.0}, lim), 4.0,
              kTight);
  // Trapezoidal once the velocity bound is active: d / v + v / a.
  const KinematicLimits slow = KinematicLimits::Symmetric(2.0, 1.0);
  EXPECT_NEAR(AxisTimeOptimal(AxisBoundary{0.0, 0.0, 8.0, 0.0}, slow), 8.5,
              kTight);
}

TEST(OptimalSyncTimeTest, Fig2PairNeedsTheUpperBoundary) {
  const std::vector<AxisBoundary> axes = {kAxisX, kAxisY};
  const std::vector<KinematicLimits> limits = {kFig2Limits, kFig2Limits};
  const SyncResult r = OptimalSyncTime(axes, limits);
  EXPECT_NEAR(r.duration, 8.0 + 2.0 * kSqrt6, 1e-9);
  ASSERT_EQ(r.per_axis.size(), 2u);
  EXPECT_EQ(r.per_axis[0].kind, PatternKind::kSyncPositive);
  EXPECT_GT(r.duration, 4.5);
  for (size_t i = 0; i < axes.size(); ++i) {
    EXPECT_TRUE(IsFeasible(r.per_axis[i], limits[i]));
    ExpectConsistent(r.per_axis[i], axes[i], r.duration);
  }
  // Dense-grid oracle: y is infeasible inside the gap.
  for (double T = 3.2; T < 12.8; T += 0.05) {
    EXPECT_FALSE(FeasibilityOracle(kAxisY, kFig2Limits, T, 1e-3)) << T;
  }
}

TEST(OptimalSyncTimeTest, SingleAxisReducesToOptimum) {
  const std::vector<AxisBoundary> axes = {kAxisX};
  const std::vector<KinematicLimits> limits = {kFig2Limits};
  EXPECT_NEAR(OptimalSyncTime(axes, limits).duration, 4.5, kTight);
}

TEST(OptimalSyncTimeTest, NullAxes) {
  const std::vector<AxisBoundary> axes(2);
  const std::vector<KinematicLimits> limits(2, kFig2Limits);
  EXPECT_EQ(OptimalSyncTime(axes, limits).duration, 0.0);
}

TEST(OptimalSyncTimeTest, RejectsMismatchedInputs) {
  const std::vector<AxisBoundary> axes(2);
  const std::vector<KinematicLimits> limits(1, kFig2Limits);
  EXPECT_THROW(OptimalSyncTime(axes, limits), Error);
  EXPECT_THROW(OptimalSyncTime({}, {}), Error);
}

TEST(SampleTrajectoryTest, Fig4VelocitySamples) {
  const std::vector<AxisBoundary> axes = {kAxisFig4};
  const std::vector<KinematicLimits> limits = {kFig4Limits};
  const SyncResult r = OptimalSyncTime(axes, limits);
  ASSERT_NEAR(r.duration, 3.0, kTight);
  const auto samples = SampleTrajectory(r, axes, 0.5);
  const std::vector<double> expected = {0, 0.25, 0.5, 0.75, 1.0, 0.75, 0.5};
  ASSERT_EQ(samples.size(), expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(samples[i].t, 0.5 * i, 1e-12);
    EXPECT_NEAR(samples[i].velocity[0], expected[i], 1e-9);
  }
  EXPECT_NEAR(samples.back().position[0], 1.75, 1e-6);
}

TEST(SampleTrajectoryTest, ZeroLengthGivesSingleSample) {
  const std::vector<AxisBoundary> axes(1);
  const std::vector<KinematicLimits> limits = {kFig2Limits};
  const auto samples =
      SampleTrajectory(OptimalSyncTime(axes, limits), axes, 0.1);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].t, 0.0);
}

TEST(SampleTrajectoryTest, FinalSampleAtDurationAndWithinBounds) {
  const std::vector<AxisBoundary> axes = {kAxisX, kAxisY};
  const std::vector<KinematicLimits> limits = {kFig2Limits, kFig2Limits};
  const SyncResult r = OptimalSyncTime(axes, limits);
  const auto samples = SampleTrajectory(r, axes, 0.3);
  EXPECT_DOUBLE_EQ(samples.back().t, r.duration);
  for (size_t i = 0; i < axes.size(); ++i) {
    EXPECT_NEAR(samples.back().position[i], axes[i].p_e, 1e-6);
    EXPECT_NEAR(samples.back().velocity[i], axes[i].v_e, 1e-6);
  }
  for (const auto& s : samples) {
    for (const double v : s.velocity) {
      EXPECT_GE(v, -2.0 - 1e-6);
      EXPECT_LE(v, 2.0 + 1e-6);
    }
  }
  EXPECT_THROW(SampleTrajectory(r, axes, 0.0), Error);
}

TEST(FeasibilityOracleTest, PaperScenarios) {
  EXPECT_FALSE(FeasibilityOracle(kAxisY, kFig2Limits, 4.5, 1e-3));
  EXPECT_TRUE(FeasibilityOracle(kAxisY, kFig2Limits, 2.5, 1e-3));
  EXPECT_TRUE(FeasibilityOracle(kAxisX, kFig2Limits, 4.5, 1e-3));
  EXPECT_FALSE(FeasibilityOracle(kAxisX, kFig2Limits, 4.4, 1e-3));
}

}  // namespace
}  // namespace kopkit
