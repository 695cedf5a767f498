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

#ifndef PHYSDERIV_ALIGN_H_
#define PHYSDERIV_ALIGN_H_

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "physderiv/sim.h"

namespace physderiv {

enum class AlignMethod { kCorrelation, kZeroCrossing };

std::string_view AlignMethodName(AlignMethod method);
AlignMethod ParseAlignMethod(std::string_view name);

// tau_star is the re-aligning shift: ApplyShift(other, tau_star) lines
// `other` up with the reference, for both methods.
struct DelayEstimate {
  int tau_star = 0;
  double correlation_peak = 0.0;
  AlignMethod method = AlignMethod::kCorrelation;
};

enum class NoiseKind { kTemporal, kSpatial };

std::string_view NoiseKindName(NoiseKind kind);

struct NoiseClass {
  NoiseKind kind = NoiseKind::kTemporal;
  double epsilon = 0.0;
  // minimum over lags of the mean per-step L1 angle residual
  double residual_l1 = 0.0;
  int best_lag = 0;
};

inline constexpr int kDefaultMaxLag = 50;

// Sum over joints of the Pearson correlation between ref_t and other_{t+tau}
// over the overlapping samples. Joints constant on the overlap contribute 0.
double LagCorrelation(const StateMatrix& ref, const StateMatrix& other, int tau);

// Mean over the overlap of ||other_{t+tau} - ref_t||_1 (angles).
double ShiftResidualL1(const StateMatrix& ref, const StateMatrix& other, int tau);

// argmax of LagCorrelation over [-max_lag, max_lag] on the angle sequences;
// ties go to the smallest |tau|.
DelayEstimate EstimateDelay(const Trajectory& ref, const Trajectory& other,
                            int max_lag = kDefaultMaxLag);

// out_t = in_{t + tau} with boundary replication.
Trajectory ApplyShift(const Trajectory& traj, int tau);

// First k >= 1 with v_{k-1} != 0 and sign(v_k) != sign(v_{k-1}).
std::optional<int> FirstZeroCrossing(const Eigen::Ref<const Eigen::VectorXd>& velocity);

// Landmark alignment on the velocity sign change of joint `dim`.
DelayEstimate AlignZeroCrossing(const Trajectory& ref, const Trajectory& other, int dim);

NoiseClass ClassifyNoise(const Trajectory& ref, const Trajectory& other,
                         double epsilon, int max_lag = kDefaultMaxLag);

}  // namespace physderiv

#endif  // PHYSDERIV_ALIGN_H_
