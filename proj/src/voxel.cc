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

#include "physderiv/voxel.h"

#include <algorithm>

#include "physderiv/error.h"

namespace physderiv {

void VoxelGrid::Validate() const {
  if (!(gamma.array() > 0.0).all() || !gamma.allFinite() || !origin.allFinite()) {
    throw Error(ErrorKind::kConfig, "voxel gamma must be positive and finite");
  }
}

Trajectory VoxelizeTrajectory(const Trajectory& traj, const VoxelGrid& grid) {
  grid.Validate();
  Trajectory out = traj;
  for (Eigen::Index t = 0; t < out.angles.rows(); ++t) {
    const Vector3 x = traj.angles.row(t).transpose();
    out.angles.row(t) = VoxelCenter(x, grid).transpose();
  }
  out.meta.voxel_gamma = grid.gamma.maxCoeff();
  return out;
}

LemmaReport CheckLemmaBound(std::span<const LemmaSample> samples, double gamma) {
  if (samples.empty()) throw Error(ErrorKind::kConfig, "lemma check needs samples");
  if (!(gamma >= 0.0)) throw Error(ErrorKind::kConfig, "gamma must be nonnegative");
  LemmaReport report;
  report.gamma = gamma;
  report.samples = static_cast<int>(samples.size());
  double voxel_sum = 0.0, raw_sum = 0.0;
  for (const LemmaSample& s : samples) {
    const double error =
        (s.voxel_difference - s.clean_difference).cwiseAbs().maxCoeff();
    voxel_sum += error;
    raw_sum += s.raw_error;
    report.max_voxel_error = std::max(report.max_voxel_error, error);
    if (error > 2.0 * gamma + s.raw_error) ++report.samplewise_violations;
  }
  const double n = static_cast<double>(samples.size());
  report.mean_voxel_error = voxel_sum / n;
  report.mean_raw_error = raw_sum / n;
  report.bound = 2.0 * gamma + report.mean_raw_error;
  report.holds = report.mean_voxel_error <= report.bound;
  return report;
}

double MeanL1Gap(const Trajectory& a, const Trajectory& b) {
  if (a.angles.rows() != b.angles.rows()) {
    throw Error(ErrorKind::kDataset, "trajectories differ in length");
  }
  return (a.angles - b.angles).cwiseAbs().sum() / static_cast<double>(a.angles.rows());
}

}  // namespace physderiv
