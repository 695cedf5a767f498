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

#ifndef PHYSDERIV_PLANNER_H_
#define PHYSDERIV_PLANNER_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/sensitivity.h"
#include "physderiv/sim.h"

namespace physderiv {

// Bend the nominal PD trajectory through x*_t at step t by changing only
// K_p. The sensitivity model must be trained over K_p (theta index 0); any
// other parameter is held at its nominal value.
struct PlanningProblem {
  double source_kp = 0.4;
  double fixed_kd = 0.01;
  int t_constraint = 0;
  Vector3 x_target_t = Vector3::Zero();
  Vector3 final_target = Vector3::Zero();
  // joints to satisfy; empty means all three
  std::vector<int> constraint_dims;
  // x_t of the source trajectory; the model prediction is used by SolveKp and
  // the clean source rollout by PlanAndVerify when unset
  std::optional<Vector3> source_state;
};

enum class SolveMode { kRootSearch, kFixedPoint };

struct PlanSolution {
  double kp_star = 0.0;
  double delta_kp = 0.0;
  // roots found in the bracket (single-joint constraints)
  int root_count = 0;
  int iterations = 0;
  // predicted g_t(delta) - (x*_t - x_t^(s)) on the constraint joints
  Eigen::VectorXd residuals;
};

inline constexpr double kPlanTolerance = 1e-6;
inline constexpr int kPlanMaxIterations = 100;

// Solves g_t(k_p* - k_p^(s)) = x*_t - x_t^(s) over the trained range of
// delta K_p. One constraint joint: bracketed root search, smallest |delta|
// wins. Several joints: least-squares compromise. kFixedPoint iterates the
// slope form k_p* = (x*_t - x_t^(s)) / slope(k_p* - k_p^(s)) + k_p^(s) and
// needs a single joint.
PlanSolution SolveKp(const SensitivityModel& model, const PlanningProblem& problem,
                     SolveMode mode = SolveMode::kRootSearch);

// Simulation setup used to verify a plan.
struct PlanSimConfig {
  PolicySpec policy;  // pd_feedback; theta(0) is replaced by K_p
  JointState x0 = StartState();
  int steps = 1500;
  double dt = 0.01;
  DynamicsMode mode;
};

struct PlanReport {
  PlanSolution solution;
  Vector3 source_state = Vector3::Zero();
  Vector3 achieved_state = Vector3::Zero();
  double miss_distance = 0.0;
  double source_miss_distance = 0.0;
  // 1 - miss / source_miss
  double improvement = 0.0;
  bool improved = false;
  Trajectory source;
  Trajectory planned;
};

PlanReport PlanAndVerify(const SensitivityModel& model, const PlanningProblem& problem,
                         const PlanSimConfig& sim, SolveMode mode = SolveMode::kRootSearch);

PolicySpec PdPolicyWithGain(const PolicySpec& base, double kp);

struct PlanningScenario {
  std::string name;
  // K_p offset that generates the intermediate target
  double kp_offset = 0.0;
};

// short / medium / long distance targets
std::vector<PlanningScenario> DefaultScenarios();

}  // namespace physderiv

#endif  // PHYSDERIV_PLANNER_H_
