// Copyright 2026 The physderiv Authors
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

#include "physderiv/align.h"

#include <numbers>

#include <gtest/gtest.h>

#include "physderiv/error.h"

namespace physderiv {
namespace {

constexpr double kPi = std::numbers::pi;

Trajectory PdTrajectory(double kp, int steps = 600) {
  PolicySpec policy;
  policy.family = PolicyFamily::kPdFeedback;
  policy.theta = Eigen::Vector2d(kp, 0.01);
  policy.fixed.target = Vector3(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);
  DynamicsMode mode;
  mode.tag = Dynamics::kPendulum3;
  return Rollout(policy, StartState(), steps, 0.01, mode);
}

TEST(EstimateDelayTest, RecoversInjectedShift) {
  const Trajectory ref = PdTrajectory(1.0);
  const DelayEstimate e = EstimateDelay(ref, InjectTemporalNoise(ref, 5), 50);
  EXPECT_EQ(e.tau_star, -5);
  EXPECT_NEAR(e.correlation_peak, 3.0, 1e-12);
}

TEST(EstimateDelayTest, ReAlignedTrajectoryMatchesReference) {
  const Trajectory ref = PdTrajectory(1.0);
  for (int n : {-17, 3, 40}) {
    const Trajectory other = InjectTemporalNoise(ref, n);
    const DelayEstimate e = EstimateDelay(ref, other, 50);
    const Trajectory back = ApplyShift(other, e.tau_star);
    const int rows = static_cast<int>(ref.angles.rows());
    const int lo = std::max(0, n), hi = rows - std::max(0, -n);
    for (int t = lo; t < hi; ++t) EXPECT_EQ(back.angles.row(t), ref.angles.row(t));
  }
}

TEST(EstimateDelayTest, ExactOverFullLagWindow) {
  const Trajectory ref = PdTrajectory(0.6);
  int failures = 0;
  for (int n = -50; n <= 50; ++n) {
    if (EstimateDelay(ref, InjectTemporalNoise(ref, n), 50).tau_star != -n) ++failures;
  }
  EXPECT_EQ(failures, 0);
}

TEST(EstimateDelayTest, ZeroShiftGivesZero) {
  const Trajectory ref = PdTrajectory(1.0);
  EXPECT_EQ(EstimateDelay(ref, ref, 10).tau_star, 0);
}

TEST(EstimateDelayTest, ConstantTrajectoryIsDegenerate) {
  PolicySpec hold;
  hold.family = PolicyFamily::kLinearOpenLoop;
  hold.theta = Eigen::VectorXd::Zero(6);
  DynamicsMode mode;
  const Trajectory flat = Rollout(hold, StartState(), 100, 0.01, mode);
  try {
    EstimateDelay(flat, flat, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateSignal);
  }
}

TEST(EstimateDelayTest, LagWindowMustBeBelowHalfLength) {
  const Trajectory ref = PdTrajectory(1.0, 100);
  EXPECT_THROW(EstimateDelay(ref, ref, 50), Error);
  EXPECT_THROW(EstimateDelay(ref, ref, -1), Error);
  EXPECT_NO_THROW(EstimateDelay(ref, ref, 49));
}

TEST(ZeroCrossingTest, FindsFirstSignChange) {
  Eigen::VectorXd v(6);
  v << 0.0, 0.5, 0.2, -0.1, -0.3, 0.4;
  EXPECT_EQ(FirstZeroCrossing(v), 3);
  EXPECT_FALSE(FirstZeroCrossing(Eigen::VectorXd::Ones(5)).has_value());
}

Trajectory SineTrajectory() {
  PolicySpec policy;
  policy.family = PolicyFamily::kSinusoidal;
  policy.theta = Eigen::Vector2d(0.5, 0.01);
  policy.fixed.joints = {0};
  DynamicsMode mode;
  mode.tag = Dynamics::kPendulum3;
  return Rollout(policy, StartState(), 800, 0.01, mode);
}

TEST(ZeroCrossingTest, AgreesWithCorrelation) {
  const Trajectory ref = SineTrajectory();
  for (int n : {-12, -1, 0, 4, 9}) {
    const Trajectory other = InjectTemporalNoise(ref, n);
    EXPECT_EQ(AlignZeroCrossing(ref, other, 0).tau_star, EstimateDelay(ref, other, 50).tau_star);
  }
}

TEST(ZeroCrossingTest, MissingLandmark) {
  PolicySpec push;
  push.family = PolicyFamily::kLinearOpenLoop;
  push.theta = Eigen::VectorXd::Zero(6);
  push.theta(4) = 0.01;
  DynamicsMode mode;
  const Trajectory t = Rollout(push, StartState(), 100, 0.01, mode);
  try {
    AlignZeroCrossing(t, t, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLandmarkMissing);
  }
}

TEST(ClassifyNoiseTest, PureShiftIsTemporal) {
  const Trajectory ref = PdTrajectory(1.0);
  const NoiseClass c = ClassifyNoise(ref, InjectTemporalNoise(ref, 8), 1e-9, 50);
  EXPECT_EQ(c.kind, NoiseKind::kTemporal);
  EXPECT_EQ(c.best_lag, -8);
  EXPECT_EQ(c.residual_l1, 0.0);
}

TEST(ClassifyNoiseTest, SpatialNoiseSurvivesEveryShift) {
  const Trajectory ref = PdTrajectory(1.0);
  const Trajectory noisy = InjectSpatialNoise(InjectTemporalNoise(ref, 4), Vector3::Constant(0.05), 2);
  const NoiseClass c = ClassifyNoise(ref, noisy, 0.01, 50);
  EXPECT_EQ(c.kind, NoiseKind::kSpatial);
  EXPECT_GT(c.residual_l1, 0.01);
  EXPECT_THROW(ClassifyNoise(ref, noisy, 0.0, 50), Error);
}

TEST(AlignMethodTest, ParsesShortNames) {
  EXPECT_EQ(ParseAlignMethod("corr"), AlignMethod::kCorrelation);
  EXPECT_EQ(ParseAlignMethod("zero"), AlignMethod::kZeroCrossing);
  EXPECT_THROW(ParseAlignMethod("dtw"), Error);
}

}  // namespace
}  // namespace physderiv
