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

#ifndef PHYSDERIV_CONTROLLERS_H_
#define PHYSDERIV_CONTROLLERS_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace physderiv {

using Vector3 = Eigen::Vector3d;
using TorqueVector = Eigen::Vector3d;

struct JointState {
  Vector3 angles = Vector3::Zero();      // radians
  Vector3 velocities = Vector3::Zero();  // radians / second
};

enum class PolicyFamily { kLinearOpenLoop, kSinusoidal, kPFeedback, kPdFeedback };

std::string_view PolicyFamilyName(PolicyFamily family);
PolicyFamily ParsePolicyFamily(std::string_view name);

// Non-differentiated constants of a policy.
struct PolicyFixed {
  // feedback target x*
  Vector3 target = Vector3::Zero();
  // sinusoid: driven joints (0-based), in theta order
  std::vector<int> joints;
  // sinusoid: amplitudes used when theta carries only frequencies
  Eigen::VectorXd amplitudes;
  // pd: derivative gain used when theta carries only K_p
  double kd = 0.0;
};

// Controller family plus flat parameter vector theta.
//
// theta layout per family:
//   linear_openloop  (w1, w2, w3, b1, b2, b3)
//   sinusoidal       (A_1..A_k, omega_1..omega_k) or (omega_1..omega_k)
//   p_feedback       (K_p)
//   pd_feedback      (K_p, K_d) or (K_p) with fixed.kd
struct PolicySpec {
  PolicyFamily family = PolicyFamily::kLinearOpenLoop;
  Eigen::VectorXd theta;
  PolicyFixed fixed;
  std::string id;

  // same policy with a different parameter vector
  PolicySpec WithTheta(const Eigen::VectorXd& new_theta) const;
};

// Checks the theta length and fixed block for the family; throws kConfig.
void ValidatePolicy(const PolicySpec& policy);

// u_i = w_i t + b_i, t in seconds.
TorqueVector LinearOpenLoop(double time, const Eigen::Ref<const Eigen::VectorXd>& theta);

// Driven joints receive A sin(omega * step); omega is in radians per step.
TorqueVector Sinusoidal(int step, const Eigen::Ref<const Eigen::VectorXd>& theta,
                        const PolicyFixed& fixed);

// u = K_p e + K_d de with e = x* - angles, de = -velocities.
TorqueVector PdFeedback(const JointState& state, double kp, double kd,
                        const Vector3& target);

// Dispatches on the family. Throws kPolicyEval on a non-finite result.
TorqueVector EvaluatePolicy(const PolicySpec& policy, int step, double time,
                            const JointState& state);

}  // namespace physderiv

#endif  // PHYSDERIV_CONTROLLERS_H_
