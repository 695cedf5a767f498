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

#include "physderiv/sim.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "physderiv/error.h"

namespace physderiv {

namespace {

void CheckFinite(const JointState& state, const TorqueVector& torque) {
  if (!state.angles.allFinite() || !state.velocities.allFinite() ||
      !torque.allFinite()) {
    throw Error(ErrorKind::kInvalidState, "non-finite state or torque");
  }
}

void ClampToLimits(JointState& state) {
  for (int i = 0; i < 3; ++i) {
    if (state.angles(i) < kJointLower(i)) {
      state.angles(i) = kJointLower(i);
      state.velocities(i) = 0.0;
    } else if (state.angles(i) > kJointUpper(i)) {
      state.angles(i) = kJointUpper(i);
      state.velocities(i) = 0.0;
    }
  }
}

JointState LinearStep(const JointState& state, const TorqueVector& u, double dt,
                      double damping) {
  JointState next;
  if (damping == 0.0) {
    next.velocities = state.velocities + u * dt;
    next.angles = state.angles + state.velocities * dt + u * (0.5 * dt * dt);
    return next;
  }
  const double c = damping;
  // (1 - e^{-c dt}) / c
  const double decay_integral = -std::expm1(-c * dt) / c;
  const double decay = 1.0 - c * decay_integral;
  next.velocities = state.velocities * decay + u * decay_integral;
  next.angles = state.angles + state.velocities * decay_integral +
                u * ((dt - decay_integral) / c);
  return next;
}

}  // namespace

JointState StartState() {
  JointState x0;
  x0.angles = Vector3(std::numbers::pi / 2.0, std::numbers::pi / 2.0, std::numbers::pi);
  return x0;
}

std::string_view DynamicsName(Dynamics tag) {
  return tag == Dynamics::kLinear ? "linear" : "pendulum3";
}

Dynamics ParseDynamics(std::string_view name) {
  if (name == "linear") return Dynamics::kLinear;
  if (name == "pendulum3") return Dynamics::kPendulum3;
  throw Error(ErrorKind::kConfig, "unknown dynamics mode '" + std::string(name) + "'");
}

JointState Trajectory::state(int k) const {
  JointState s;
  s.angles = angles.row(k).transpose();
  s.velocities = velocities.row(k).transpose();
  return s;
}

void Trajectory::Validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidState, "dt must be positive");
  if (steps() < 1) throw Error(ErrorKind::kInvalidState, "trajectory needs T >= 1");
  if (angles.rows() != steps() + 1 || velocities.rows() != steps() + 1) {
    throw Error(ErrorKind::kInvalidState,
                "states must have exactly one more row than torques");
  }
}

Vector3 ChainAcceleration(const JointState& state, const TorqueVector& torque,
                          const DynamicsMode& mode, const ChainGeometry& geometry) {
  // absolute link angles and rates
  Vector3 phi, phi_rate;
  double sum = 0.0, rate = 0.0;
  for (int k = 0; k < 3; ++k) {
    sum += state.angles(k);
    rate += state.velocities(k);
    phi(k) = sum;
    phi_rate(k) = rate;
  }

  Eigen::Matrix3d mass = geometry.armature * Eigen::Matrix3d::Identity();
  Vector3 bias = Vector3::Zero();
  for (int i = 0; i < 3; ++i) {
    Eigen::Matrix<double, 2, 3> jacobian = Eigen::Matrix<double, 2, 3>::Zero();
    Eigen::Vector2d drift(0.0, mode.gravity_gain);
    for (int k = 0; k <= i; ++k) {
      const double l = geometry.lengths(k);
      const Eigen::Vector2d tangent(-std::sin(phi(k)), std::cos(phi(k)));
      const Eigen::Vector2d radial(std::cos(phi(k)), std::sin(phi(k)));
      for (int j = 0; j <= k; ++j) jacobian.col(j) += l * tangent;
      drift -= l * phi_rate(k) * phi_rate(k) * radial;
    }
    mass += geometry.masses(i) * jacobian.transpose() * jacobian;
    bias += geometry.masses(i) * jacobian.transpose() * drift;
  }
  const Vector3 rhs = torque - mode.damping * state.velocities - bias;
  return mass.ldlt().solve(rhs);
}

JointState Step(const JointState& state, const TorqueVector& torque, double dt,
                const DynamicsMode& mode, const ChainGeometry& geometry) {
  CheckFinite(state, torque);
  if (!(dt > 0.0)) throw Error(ErrorKind::kInvalidState, "dt must be positive");
  if ((torque.array().abs() > mode.torque_cap).any()) {
    throw Error(ErrorKind::kInvalidState, "torque exceeds the configured cap");
  }

  JointState next;
  if (mode.tag == Dynamics::kLinear) {
    next = LinearStep(state, torque, dt, mode.damping);
  } else {
    const Vector3 accel = ChainAcceleration(state, torque, mode, geometry);
    next.velocities = state.velocities + dt * accel;
    next.angles = state.angles + dt * next.velocities;
  }
  ClampToLimits(next);
  if (!next.angles.allFinite() || !next.velocities.allFinite()) {
    throw Error(ErrorKind::kInvalidState, "integration produced a non-finite state");
  }
  return next;
}

Trajectory Rollout(const PolicySpec& policy, const JointState& x0, int steps,
                   double dt, const DynamicsMode& mode, const NoiseConfig& noise) {
  if (steps < 1) throw Error(ErrorKind::kConfig, "rollout needs T >= 1");
  if (!(dt > 0.0)) throw Error(ErrorKind::kConfig, "dt must be positive");
  if (((x0.angles - kJointLower).array() < 0.0).any() ||
      ((kJointUpper - x0.angles).array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidState, "start state outside the joint limits");
  }
  ValidatePolicy(policy);

  Trajectory traj;
  traj.dt = dt;
  traj.angles.resize(steps + 1, 3);
  traj.velocities.resize(steps + 1, 3);
  traj.torques.resize(steps, 3);
  traj.meta.policy_id = policy.id;
  traj.meta.seed = noise.seed;
  traj.meta.mode = std::string(DynamicsName(mode.tag));
  traj.meta.noise_id = noise.id;

  JointState state = x0;
  if (noise.initial_state_std > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> normal(0.0, noise.initial_state_std);
    for (int i = 0; i < 3; ++i) state.angles(i) += normal(rng);
    ClampToLimits(state);
  }

  traj.angles.row(0) = state.angles.transpose();
  traj.velocities.row(0) = state.velocities.transpose();
  for (int k = 0; k < steps; ++k) {
    TorqueVector u = EvaluatePolicy(policy, k, k * dt, state);
    u = u.cwiseMax(-mode.torque_cap).cwiseMin(mode.torque_cap);
    state = Step(state, u, dt, mode);
    traj.torques.row(k) = u.transpose();
    traj.angles.row(k + 1) = state.angles.transpose();
    traj.velocities.row(k + 1) = state.velocities.transpose();
  }

  if (noise.temporal_shift != 0) {
    traj = InjectTemporalNoise(traj, noise.temporal_shift);
  }
  if ((noise.spatial_std.array() > 0.0).any()) {
    traj = InjectSpatialNoise(traj, noise.spatial_std, noise.seed + 1);
  }
  return traj;
}

Trajectory InjectTemporalNoise(const Trajectory& traj, int shift) {
  const int steps = traj.steps();
  if (std::abs(shift) >= steps) {
    throw Error(ErrorKind::kInvalidShift,
                "shift " + std::to_string(shift) + " must satisfy |n| < T");
  }
  Trajectory out = traj;
  for (int t = 0; t <= steps; ++t) {
    const int src = std::clamp(t + shift, 0, steps);
    out.angles.row(t) = traj.angles.row(src);
    out.velocities.row(t) = traj.velocities.row(src);
  }
  for (int t = 0; t < steps; ++t) {
    out.torques.row(t) = traj.torques.row(std::clamp(t + shift, 0, steps - 1));
  }
  out.meta.temporal_shift += shift;
  return out;
}

Trajectory InjectSpatialNoise(const Trajectory& traj, const Vector3& spatial_std,
                              std::uint64_t seed) {
  if ((spatial_std.array() < 0.0).any() || !spatial_std.allFinite()) {
    throw Error(ErrorKind::kConfig, "spatial_std must be finite and nonnegative");
  }
  Trajectory out = traj;
  out.meta.spatial_std = spatial_std;
  if ((spatial_std.array() == 0.0).all()) return out;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double deviation = 0.0;
  for (Eigen::Index t = 0; t < out.angles.rows(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const double n = spatial_std(i) * normal(rng);
      out.angles(t, i) += n;
      deviation = std::max(deviation, std::abs(n));
    }
  }
  out.meta.spatial_deviation = deviation;
  return out;
}

double SupNormDistance(const Trajectory& a, const Trajectory& b) {
  if (a.angles.rows() != b.angles.rows()) {
    throw Error(ErrorKind::kDataset, "trajectory lengths differ");
  }
  return (a.angles - b.angles).cwiseAbs().maxCoeff();
}

}  // namespace physderiv
