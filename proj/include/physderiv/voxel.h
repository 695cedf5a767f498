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

#ifndef PHYSDERIV_VOXEL_H_
#define PHYSDERIV_VOXEL_H_

#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "physderiv/sim.h"

namespace physderiv {

// Axis-aligned cells of half-width gamma anchored at origin. Cell width is
// 2 gamma, so every point lies within gamma (sup-norm) of its cell center.
struct VoxelGrid {
  Vector3 gamma = Vector3::Constant(0.01);
  Vector3 origin = Vector3::Zero();

  static VoxelGrid Uniform(double gamma, const Vector3& origin = Vector3::Zero()) {
    return VoxelGrid{Vector3::Constant(gamma), origin};
  }

  // throws kConfig unless gamma > 0 componentwise
  void Validate() const;
};

// c_i = origin_i + 2 gamma_i (floor((x_i - origin_i) / (2 gamma_i)) + 1/2)
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 1> VoxelCenter(
    const Eigen::MatrixBase<Derived>& x, const VoxelGrid& grid) {
  using Scalar = typename Derived::Scalar;
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  Eigen::Matrix<Scalar, 3, 1> center;
  for (int i = 0; i < 3; ++i) {
    const Scalar width = Scalar(2) * Scalar(grid.gamma(i));
    const Scalar origin = Scalar(grid.origin(i));
    const Scalar cell = std::floor((x(i) - origin) / width);
    center(i) = origin + width * (cell + Scalar(0.5));
  }
  return center;
}

// Maps every angle sample to its cell center; velocities are left as is.
Trajectory VoxelizeTrajectory(const Trajectory& traj, const VoxelGrid& grid);

// One Monte Carlo pair for the voxelization error bound.
struct LemmaSample {
  // x2 - x1 (noise free)
  Vector3 clean_difference = Vector3::Zero();
  // c(y2) - c(y1) (noisy, voxelized)
  Vector3 voxel_difference = Vector3::Zero();
  // ||eps2 - eps1||_inf
  double raw_error = 0.0;
};

struct LemmaReport {
  double gamma = 0.0;
  int samples = 0;
  double mean_voxel_error = 0.0;
  double max_voxel_error = 0.0;
  double mean_raw_error = 0.0;
  // 2 gamma + mean raw error
  double bound = 0.0;
  bool holds = false;
  // samples with ||voxel error|| > 2 gamma + raw error
  int samplewise_violations = 0;
};

// Mean of ||(c(y2) - c(y1)) - (x2 - x1)||_inf against 2 gamma + mean raw error.
LemmaReport CheckLemmaBound(std::span<const LemmaSample> samples, double gamma);

// Mean per-step L1 distance between the angle sequences.
double MeanL1Gap(const Trajectory& a, const Trajectory& b);

}  // namespace physderiv

#endif  // PHYSDERIV_VOXEL_H_
