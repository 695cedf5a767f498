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

#ifndef PHYSDERIV_SIM_H_
#define PHYSDERIV_SIM_H_

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "physderiv/controllers.h"

namespace physderiv {

using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// joint ranges of the finger platform
inline const Vector3 kJointLower{0.0, 0.0, 0.0};
inline const Vector3 kJointUpper{std::numbers::pi, std::numbers::pi, 2.0 * std::numbers::pi};

// (pi/2, pi/2, pi) at rest
JointState StartState();

enum class Dynamics { kLinear, kPendulum3 };

std::string_view DynamicsName(Dynamics tag);
Dynamics ParseDynamics(std::string_view name);

struct DynamicsMode {
  Dynamics tag = Dynamics::kLinear;
  double damping = 1.0;
  // pendulum3 only
  double gravity_gain = 0.5;
  // elementwise |u| limit; rollouts saturate, Step rejects
  double torque_cap = 10.0;
};

// Link constants of the pendulum3 chain. Point masses sit at link ends.
struct ChainGeometry {
  Vector3 lengths{0.5, 0.5, 0.4};
  Vector3 masses{0.3, 0.3, 0.2};
  double armature = 0.05;
};

struct NoiseConfig {
  // x_t <- x_{t+n}, constant over the rollout
  int temporal_shift = 0;
  // per-joint std of additive angle noise
  Vector3 spatial_std = Vector3::Zero();
  std::uint64_t seed = 0;
  // std of the Gaussian jitter applied to the start angles
  double initial_state_std = 0.0;
  std::string id = "clean";
};

struct TrajectoryMeta {
  std::string policy_id;
  std::uint64_t seed = 0;
  std::string mode = "linear";
  std::string noise_id = "clean";
  int temporal_shift = 0;
  Vector3 spatial_std = Vector3::Zero();
  // measured sup-norm of the injected spatial noise
  double spatial_deviation = 0.0;
  std::optional<double> voxel_gamma;
};

// One rollout: T+1 states and T torques sampled every dt seconds.
struct Trajectory {
  double dt = 0.01;
  StateMatrix angles;      // (T+1) x 3
  StateMatrix velocities;  // (T+1) x 3
  StateMatrix torques;     // T x 3
  TrajectoryMeta meta;

  int steps() const { return static_cast<int>(torques.rows()); }
  JointState state(int k) const;

  // throws kInvalidState when the shape invariants fail
  void Validate() const;
};

// Exact zero-order-hold discretization of x'' = u - c x' in linear mode,
// semi-implicit Euler of the 3-link chain in pendulum3 mode. Angles leaving
// the joint range are clamped and the joint velocity zeroed.
JointState Step(const JointState& state, const TorqueVector& torque, double dt,
                const DynamicsMode& mode,
                const ChainGeometry& geometry = ChainGeometry());

// Joint-space acceleration of the pendulum3 chain.
Vector3 ChainAcceleration(const JointState& state, const TorqueVector& torque,
                          const DynamicsMode& mode, const ChainGeometry& geometry);

Trajectory Rollout(const PolicySpec& policy, const JointState& x0, int steps,
                   double dt, const DynamicsMode& mode,
                   const NoiseConfig& noise = NoiseConfig());

// Time shift with boundary replication: out_t = in_{clamp(t + n)}.
Trajectory InjectTemporalNoise(const Trajectory& traj, int shift);

// Adds zero-mean Gaussian noise to every angle sample.
Trajectory InjectSpatialNoise(const Trajectory& traj, const Vector3& spatial_std,
                              std::uint64_t seed);

// sup over t and joints of |a - b| on angles
double SupNormDistance(const Trajectory& a, const Trajectory& b);

}  // namespace physderiv

#endif  // PHYSDERIV_SIM_H_
