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

#include <cmath>
#include <limits>
#include <string>

#include "physderiv/error.h"

namespace physderiv {

namespace {

void CheckComparable(const Trajectory& ref, const Trajectory& other) {
  ref.Validate();
  other.Validate();
  if (ref.angles.rows() != other.angles.rows()) {
    throw Error(ErrorKind::kDataset, "trajectories differ in length");
  }
  if (std::abs(ref.dt - other.dt) > 1e-12 * ref.dt) {
    throw Error(ErrorKind::kDataset, "trajectories differ in dt");
  }
}

void CheckMaxLag(int max_lag, int steps) {
  if (max_lag < 0 || 2 * max_lag >= steps) {
    throw Error(ErrorKind::kConfig,
                "max_lag " + std::to_string(max_lag) + " must be in [0, T/2)");
  }
}

bool IsConstant(const StateMatrix& m) {
  return ((m.rowwise() - m.row(0)).cwiseAbs().maxCoeff()) == 0.0;
}

// overlap rows: ref rows [begin, begin + length), other rows shifted by tau
struct Overlap {
  Eigen::Index ref_begin = 0;
  Eigen::Index other_begin = 0;
  Eigen::Index length = 0;
};

Overlap OverlapFor(Eigen::Index rows, int tau) {
  Overlap o;
  o.ref_begin = tau >= 0 ? 0 : -tau;
  o.other_begin = o.ref_begin + tau;
  o.length = rows - std::abs(tau);
  return o;
}

}  // namespace

std::string_view AlignMethodName(AlignMethod method) {
  return method == AlignMethod::kCorrelation ? "correlation" : "zero_crossing";
}

AlignMethod ParseAlignMethod(std::string_view name) {
  if (name == "corr" || name == "correlation") return AlignMethod::kCorrelation;
  if (name == "zero" || name == "zero_crossing") return AlignMethod::kZeroCrossing;
  throw Error(ErrorKind::kConfig, "unknown alignment method '" + std::string(name) + "'");
}

std::string_view NoiseKindName(NoiseKind kind) {
  return kind == NoiseKind::kTemporal ? "temporal" : "spatial";
}

double LagCorrelation(const StateMatrix& ref, const StateMatrix& other, int tau) {
  const Overlap o = OverlapFor(ref.rows(), tau);
  if (o.length < 2) return 0.0;
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Eigen::VectorXd a = ref.col(j).segment(o.ref_begin, o.length);
    const Eigen::VectorXd b = other.col(j).segment(o.other_begin, o.length);
    const Eigen::VectorXd za = a.array() - a.mean();
    const Eigen::VectorXd zb = b.array() - b.mean();
    const double denom = std::sqrt(za.squaredNorm() * zb.squaredNorm());
    if (denom > 0.0) total += za.dot(zb) / denom;
  }
  return total;
}

double ShiftResidualL1(const StateMatrix& ref, const StateMatrix& other, int tau) {
  const Overlap o = OverlapFor(ref.rows(), tau);
  if (o.length < 1) return std::numeric_limits<double>::infinity();
  const double sum = (other.middleRows(o.other_begin, o.length) -
                      ref.middleRows(o.ref_begin, o.length))
                         .cwiseAbs()
                         .sum();
  return sum / static_cast<double>(o.length);
}

DelayEstimate EstimateDelay(const Trajectory& ref, const Trajectory& other,
                            int max_lag) {
  CheckComparable(ref, other);
  CheckMaxLag(max_lag, ref.steps());
  if (IsConstant(ref.angles) || IsConstant(other.angles)) {
    throw Error(ErrorKind::kDegenerateSignal, "cannot align a constant trajectory");
  }
  DelayEstimate best;
  best.method = AlignMethod::kCorrelation;
  best.correlation_peak = LagCorrelation(ref.angles, other.angles, 0);
  // visit 0, -1, +1, -2, +2, ... so strict improvement keeps the smallest |tau|
  for (int magnitude = 1; magnitude <= max_lag; ++magnitude) {
    for (int tau : {-magnitude, magnitude}) {
      const double c = LagCorrelation(ref.angles, other.angles, tau);
      if (c > best.correlation_peak) {
        best.correlation_peak = c;
        best.tau_star = tau;
      }
    }
  }
  return best;
}

Trajectory ApplyShift(const Trajectory& traj, int tau) {
  return InjectTemporalNoise(traj, tau);
}

std::optional<int> FirstZeroCrossing(const Eigen::Ref<const Eigen::VectorXd>& velocity) {
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  for (Eigen::Index k = 1; k < velocity.size(); ++k) {
    const int before = sign(velocity(k - 1));
    if (before != 0 && sign(velocity(k)) != before) return static_cast<int>(k);
  }
  return std::nullopt;
}

DelayEstimate AlignZeroCrossing(const Trajectory& ref, const Trajectory& other, int dim) {
  CheckComparable(ref, other);
  if (dim < 0 || dim > 2) throw Error(ErrorKind::kConfig, "joint index must be 0, 1 or 2");
  const std::optional<int> ref_index = FirstZeroCrossing(ref.velocities.col(dim));
  const std::optional<int> other_index = FirstZeroCrossing(other.velocities.col(dim));
  if (!ref_index || !other_index) {
    throw Error(ErrorKind::kLandmarkMissing,
                "no velocity zero-crossing in joint " + std::to_string(dim));
  }
  DelayEstimate estimate;
  estimate.method = AlignMethod::kZeroCrossing;
  estimate.tau_star = *other_index - *ref_index;
  if (std::abs(estimate.tau_star) < ref.angles.rows()) {
    estimate.correlation_peak =
        LagCorrelation(ref.angles, other.angles, estimate.tau_star);
  }
  return estimate;
}

NoiseClass ClassifyNoise(const Trajectory& ref, const Trajectory& other,
                         double epsilon, int max_lag) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::kConfig, "epsilon must be positive");
  CheckComparable(ref, other);
  CheckMaxLag(max_lag, ref.steps());
  NoiseClass result;
  result.epsilon = epsilon;
  result.residual_l1 = ShiftResidualL1(ref.angles, other.angles, 0);
  for (int magnitude = 1; magnitude <= max_lag; ++magnitude) {
    for (int tau : {-magnitude, magnitude}) {
      const double r = ShiftResidualL1(ref.angles, other.angles, tau);
      if (r < result.residual_l1) {
        result.residual_l1 = r;
        result.best_lag = tau;
      }
    }
  }
  result.kind = result.residual_l1 <= epsilon ? NoiseKind::kTemporal : NoiseKind::kSpatial;
  return result;
}

}  // namespace physderiv
