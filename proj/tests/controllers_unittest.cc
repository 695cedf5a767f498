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

#include "physderiv/controllers.h"

#include <numbers>

#include <gtest/gtest.h>

#include "physderiv/error.h"

namespace physderiv {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd PaperLinearTheta() {
  Eigen::VectorXd theta(6);
  theta << 0.00001, 0.0001, -0.00001, -0.28, -0.15, -0.08;
  return theta;
}

TEST(LinearOpenLoopTest, StartsAtBias) {
  const TorqueVector u = LinearOpenLoop(0.0, PaperLinearTheta());
  EXPECT_EQ(u, Vector3(-0.28, -0.15, -0.08));
}

TEST(LinearOpenLoopTest, SlopeAfterTenSeconds) {
  const TorqueVector u = LinearOpenLoop(1000 * 0.01, PaperLinearTheta());
  EXPECT_NEAR(u(0), -0.2799, 1e-15);
}

TEST(LinearOpenLoopTest, ZeroSlopeIsConstant) {
  Eigen::VectorXd theta = PaperLinearTheta();
  theta.head<3>().setZero();
  EXPECT_EQ(LinearOpenLoop(0.0, theta), LinearOpenLoop(123.4, theta));
}

TEST(LinearOpenLoopTest, AffineInTheta) {
  Eigen::VectorXd a = PaperLinearTheta(), b(6);
  b << 0.3, -0.2, 0.1, 0.05, 0.4, -0.6;
  for (double w : {0.0, 0.25, 0.7, 1.0}) {
    const TorqueVector mixed = LinearOpenLoop(3.3, w * a + (1 - w) * b);
    const TorqueVector expected = w * LinearOpenLoop(3.3, a) + (1 - w) * LinearOpenLoop(3.3, b);
    EXPECT_NEAR((mixed - expected).norm(), 0.0, 1e-15);
  }
}

TEST(SinusoidalTest, ZeroAtStart) {
  PolicyFixed fixed;
  fixed.joints = {0, 1};
  EXPECT_TRUE(Sinusoidal(0, Eigen::Vector4d(-0.4, 0.5, 0.01, 0.01), fixed).isZero());
}

TEST(SinusoidalTest, DrivesOnlySelectedJoints) {
  PolicyFixed fixed;
  fixed.joints = {2};
  const TorqueVector u = Sinusoidal(50, Eigen::Vector2d(0.5, 0.01), fixed);
  EXPECT_EQ(u(0), 0.0);
  EXPECT_EQ(u(1), 0.0);
  EXPECT_DOUBLE_EQ(u(2), 0.5 * std::sin(0.5));
}

TEST(SinusoidalTest, TwoJointsWithOwnParameters) {
  PolicyFixed fixed;
  fixed.joints = {0, 1};
  const TorqueVector u = Sinusoidal(100, Eigen::Vector4d(-0.4, 0.5, 0.01, 0.02), fixed);
  EXPECT_DOUBLE_EQ(u(0), -0.4 * std::sin(1.0));
  EXPECT_DOUBLE_EQ(u(1), 0.5 * std::sin(2.0));
  EXPECT_EQ(u(2), 0.0);
}

TEST(SinusoidalTest, FrequencyOnlyUsesFixedAmplitudes) {
  PolicyFixed fixed;
  fixed.joints = {1};
  fixed.amplitudes = Eigen::VectorXd::Constant(1, 0.5);
  const TorqueVector u = Sinusoidal(10, Eigen::VectorXd::Constant(1, 0.01), fixed);
  EXPECT_DOUBLE_EQ(u(1), 0.5 * std::sin(0.1));
}

TEST(SinusoidalTest, EmptyJointSetIsConfigError) {
  PolicySpec p;
  p.family = PolicyFamily::kSinusoidal;
  p.theta = Eigen::Vector2d(0.5, 0.01);
  EXPECT_THROW(ValidatePolicy(p), Error);
  EXPECT_THROW(Sinusoidal(1, p.theta, p.fixed), Error);
}

TEST(PdFeedbackTest, ZeroAtTarget) {
  JointState s;
  s.angles = Vector3(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);
  EXPECT_TRUE(PdFeedback(s, 1.0, 0.01, s.angles).isZero());
}

TEST(PdFeedbackTest, DrivesTowardTarget) {
  JointState s;
  s.angles = Vector3(kPi / 2, kPi / 2, kPi);
  const Vector3 target(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);
  const TorqueVector u = PdFeedback(s, 1.0, 0.01, target);
  for (int i = 0; i < 3; ++i) EXPECT_GT(u(i) * (target(i) - s.angles(i)), 0.0);
}

TEST(PdFeedbackTest, DoublingKpDoublesTorqueAtRest) {
  JointState s;
  s.angles = Vector3(0.3, 1.2, 2.0);
  const Vector3 target(1.0, 1.0, 1.0);
  EXPECT_TRUE((PdFeedback(s, 2.0, 0.5, target) - 2.0 * PdFeedback(s, 1.0, 0.5, target)).isZero());
}

TEST(PdFeedbackTest, ZeroKdEqualsPFeedback) {
  JointState s;
  s.angles = Vector3(0.3, 1.2, 2.0);
  s.velocities = Vector3(0.5, -1.0, 2.0);
  PolicySpec pd, p;
  pd.family = PolicyFamily::kPdFeedback;
  pd.theta = Eigen::Vector2d(0.7, 0.0);
  pd.fixed.target = Vector3(1, 2, 3);
  p = pd;
  p.family = PolicyFamily::kPFeedback;
  p.theta = Eigen::VectorXd::Constant(1, 0.7);
  EXPECT_EQ(EvaluatePolicy(pd, 4, 0.04, s), EvaluatePolicy(p, 4, 0.04, s));
}

TEST(PdFeedbackTest, FixedKdMatchesTwoParameterForm) {
  JointState s;
  s.angles = Vector3(0.3, 1.2, 2.0);
  s.velocities = Vector3(0.5, -1.0, 2.0);
  PolicySpec two, one;
  two.family = one.family = PolicyFamily::kPdFeedback;
  two.theta = Eigen::Vector2d(1.0, 0.01);
  one.theta = Eigen::VectorXd::Constant(1, 1.0);
  one.fixed.kd = 0.01;
  EXPECT_EQ(EvaluatePolicy(two, 0, 0.0, s), EvaluatePolicy(one, 0, 0.0, s));
}

TEST(PolicyTest, ValidatesThetaLength) {
  PolicySpec p;
  p.family = PolicyFamily::kLinearOpenLoop;
  p.theta = Eigen::VectorXd::Zero(5);
  EXPECT_THROW(ValidatePolicy(p), Error);
  p.family = PolicyFamily::kPFeedback;
  p.theta = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(ValidatePolicy(p), Error);
  p.family = PolicyFamily::kPdFeedback;
  p.theta = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(ValidatePolicy(p), Error);
}

TEST(PolicyTest, FamilyNamesRoundTrip) {
  for (PolicyFamily f : {PolicyFamily::kLinearOpenLoop, PolicyFamily::kSinusoidal,
                         PolicyFamily::kPFeedback, PolicyFamily::kPdFeedback}) {
    EXPECT_EQ(ParsePolicyFamily(PolicyFamilyName(f)), f);
  }
  EXPECT_THROW(ParsePolicyFamily("pid"), Error);
}

TEST(PolicyTest, WithThetaKeepsFixedBlock) {
  PolicySpec p;
  p.family = PolicyFamily::kPdFeedback;
  p.theta = Eigen::Vector2d(1.0, 0.01);
  p.fixed.target = Vector3(1, 2, 3);
  const PolicySpec q = p.WithTheta(Eigen::Vector2d(2.0, 0.02));
  EXPECT_EQ(q.fixed.target, p.fixed.target);
  EXPECT_EQ(q.theta(0), 2.0);
}

TEST(PolicyTest, NonFiniteTorqueIsPolicyEvalError) {
  PolicySpec p;
  p.family = PolicyFamily::kPdFeedback;
  p.theta = Eigen::Vector2d(1.0, 0.01);
  JointState s;
  s.velocities(0) = INFINITY;
  try {
    EvaluatePolicy(p, 12, 0.12, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPolicyEval);
  }
}

}  // namespace
}  // namespace physderiv
