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

#include "physderiv/planner.h"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "physderiv/error.h"
#include "physderiv/perturb.h"

namespace physderiv {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDt = 0.01;
constexpr double kDamping = 4.0;
constexpr double kKd = 0.01;
constexpr double kSourceKp = 0.4;
constexpr int kSteps = 600;
constexpr int kT = 300;

const Vector3 kTarget(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);

PlanSimConfig LinearSim() {
  PlanSimConfig sim;
  sim.policy.family = PolicyFamily::kPdFeedback;
  sim.policy.theta = Eigen::VectorXd::Constant(1, kSourceKp);
  sim.policy.fixed.kd = kKd;
  sim.policy.fixed.target = kTarget;
  sim.steps = kSteps;
  sim.dt = kDt;
  sim.mode.tag = Dynamics::kLinear;
  sim.mode.damping = kDamping;
  return sim;
}

SensitivityModel FitPdModel(const PlanSimConfig& sim, int count) {
  PerturbationPlan plan;
  plan.scheme = PerturbationScheme::kUniform;
  plan.nominal = sim.policy.theta;
  plan.ranges = {ParameterRange{0.2, 0.6}};
  plan.count = count;
  plan.seed = 11;
  const Eigen::MatrixXd deltas = SampleUniform(plan);
  auto run = [&](const Eigen::VectorXd& theta) {
    return Rollout(sim.policy.WithTheta(theta), sim.x0, sim.steps, sim.dt, sim.mode);
  };
  const Trajectory source = run(plan.nominal);
  std::vector<PerturbedRollout> perturbed;
  for (Eigen::Index i = 0; i < deltas.rows(); ++i) {
    const Eigen::VectorXd d = deltas.row(i).transpose();
    perturbed.push_back({d, run(plan.nominal + d)});
  }
  FitConfig cfg;
  cfg.stride = 50;
  return FitSensitivityModel(BuildSamples(source, perturbed), source, plan.nominal, cfg);
}

double OracleAngle(double kp, int joint, int k) {
  return oracle::PdLinearAngle(kp, kKd, kDamping, kDt, StartState().angles(joint), 0.0,
                               kTarget(joint), k);
}

class LinearPlanner : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { model_ = new SensitivityModel(FitPdModel(LinearSim(), 30)); }
  static void TearDownTestSuite() { delete model_; }

  static PlanningProblem ProblemFor(double kp_goal, std::vector<int> dims) {
    PlanningProblem p;
    p.source_kp = kSourceKp;
    p.fixed_kd = kKd;
    p.t_constraint = kT;
    p.final_target = kTarget;
    p.constraint_dims = std::move(dims);
    for (int j = 0; j < 3; ++j) p.x_target_t(j) = OracleAngle(kp_goal, j, kT);
    return p;
  }

  static SensitivityModel* model_;
};

SensitivityModel* LinearPlanner::model_ = nullptr;

TEST_F(LinearPlanner, SourceMatchesClosedForm) {
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(model_->source_angles(kT, j), OracleAngle(kSourceKp, j, kT), 1e-10);
  }
}

TEST_F(LinearPlanner, TargetOnSourceKeepsGain) {
  PlanningProblem p = ProblemFor(kSourceKp, {0});
  p.source_state = Vector3(model_->source_angles.row(kT).transpose());
  p.x_target_t = *p.source_state;
  const PlanSolution s = SolveKp(*model_, p);
  EXPECT_EQ(s.delta_kp, 0.0);
  EXPECT_EQ(s.kp_star, kSourceKp);
}

TEST_F(LinearPlanner, RecoversAnalyticGain) {
  for (double goal : {0.43, 0.49, 0.57, 0.31}) {
    const PlanningProblem p = ProblemFor(goal, {0});
    const double analytic =
        oracle::SolvePdLinearGain(p.x_target_t(0), 0.2, 0.6, kKd, kDamping, kDt,
                                  StartState().angles(0), kTarget(0), kT);
    EXPECT_NEAR(analytic, goal, 1e-9);
    const PlanReport r = PlanAndVerify(*model_, p, LinearSim());
    EXPECT_NEAR(r.solution.kp_star, analytic, 1e-4) << goal;
    EXPECT_EQ(r.solution.root_count, 1);
    EXPECT_LE(r.miss_distance, 1e-3);
    EXPECT_TRUE(r.improved);
    EXPECT_GT(r.improvement, 0.8);
  }
}

TEST_F(LinearPlanner, FixedPointAgreesWithRootSearch) {
  const PlanningProblem p = ProblemFor(0.5, {0});
  const PlanSolution root = SolveKp(*model_, p);
  const PlanSolution fixed = SolveKp(*model_, p, SolveMode::kFixedPoint);
  EXPECT_NEAR(fixed.kp_star, root.kp_star, 1e-5);
  EXPECT_LT(fixed.iterations, kPlanMaxIterations);
  EXPECT_LT(std::abs(fixed.residuals(0)), 1e-5);
}

TEST_F(LinearPlanner, FixedPointNeedsOneJoint) {
  EXPECT_THROW(SolveKp(*model_, ProblemFor(0.5, {0, 1}), SolveMode::kFixedPoint), Error);
}

TEST_F(LinearPlanner, AllJointsLeastSquares) {
  const PlanningProblem p = ProblemFor(0.52, {});
  const PlanSolution s = SolveKp(*model_, p);
  EXPECT_EQ(s.residuals.size(), 3);
  EXPECT_NEAR(s.kp_star, 0.52, 1e-3);
  EXPECT_LT(s.residuals.norm(), 1e-4);
}

TEST_F(LinearPlanner, UnreachableTargetReportsRange) {
  PlanningProblem p = ProblemFor(0.5, {0});
  p.x_target_t(0) = -1.0;
  try {
    SolveKp(*model_, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTargetUnreachable);
    EXPECT_NE(std::string(e.what()).find("attainable"), std::string::npos);
  }
}

TEST_F(LinearPlanner, ConstraintTimeMustBeInterior) {
  PlanningProblem p = ProblemFor(0.5, {0});
  for (int t : {0, kSteps, -3}) {
    p.t_constraint = t;
    EXPECT_THROW(SolveKp(*model_, p), Error);
  }
  p.t_constraint = kT;
  p.constraint_dims = {3};
  EXPECT_THROW(SolveKp(*model_, p), Error);
}

TEST_F(LinearPlanner, OffsetSourceGain) {
  PlanningProblem p = ProblemFor(0.5, {0});
  p.source_kp = 0.45;
  const PlanReport r = PlanAndVerify(*model_, p, LinearSim());
  EXPECT_NEAR(r.solution.kp_star, 0.5, 1e-4);
  EXPECT_NEAR(r.source_state(0), OracleAngle(0.45, 0, kT), 1e-10);
}

TEST(PlannerPolicyTest, GainSubstitution) {
  PolicySpec pd;
  pd.family = PolicyFamily::kPdFeedback;
  pd.theta = Eigen::Vector2d(0.4, 0.01);
  EXPECT_EQ(PdPolicyWithGain(pd, 0.7).theta, Eigen::Vector2d(0.7, 0.01));
  PolicySpec sine;
  sine.family = PolicyFamily::kSinusoidal;
  sine.theta = Eigen::Vector2d(0.5, 0.01);
  EXPECT_THROW(PdPolicyWithGain(sine, 0.7), Error);
}

TEST(PlannerPolicyTest, ScenarioOffsetsIncrease) {
  const std::vector<PlanningScenario> s = DefaultScenarios();
  ASSERT_EQ(s.size(), 3u);
  EXPECT_LT(s[0].kp_offset, s[1].kp_offset);
  EXPECT_LT(s[1].kp_offset, s[2].kp_offset);
}

TEST(PendulumPlannerTest, ImprovesOnSource) {
  PlanSimConfig sim = LinearSim();
  sim.mode.tag = Dynamics::kPendulum3;
  sim.mode.damping = 1.0;
  const SensitivityModel model = FitPdModel(sim, 40);
  for (const PlanningScenario& scenario : DefaultScenarios()) {
    PlanningProblem p;
    p.source_kp = kSourceKp;
    p.fixed_kd = kKd;
    p.t_constraint = kT;
    p.final_target = kTarget;
    p.constraint_dims = {0};
    const Trajectory goal = Rollout(PdPolicyWithGain(sim.policy, kSourceKp + scenario.kp_offset),
                                    sim.x0, sim.steps, sim.dt, sim.mode);
    p.x_target_t = goal.angles.row(kT).transpose();
    const PlanReport r = PlanAndVerify(model, p, sim);
    EXPECT_TRUE(r.improved) << scenario.name;
    EXPECT_GT(r.improvement, 0.5) << scenario.name;
  }
}

}  // namespace
}  // namespace physderiv
