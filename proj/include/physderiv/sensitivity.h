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

#ifndef PHYSDERIV_SENSITIVITY_H_
#define PHYSDERIV_SENSITIVITY_H_

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/align.h"
#include "physderiv/gaussian_process.h"
#include "physderiv/perturb.h"
#include "physderiv/sim.h"
#include "physderiv/voxel.h"

namespace physderiv {

inline constexpr int kStateDim = 3;

// Noise handling applied to every trajectory before differencing.
struct PreprocessConfig {
  bool align = false;
  AlignMethod method = AlignMethod::kCorrelation;
  int max_lag = kDefaultMaxLag;
  // joint used for zero-crossing landmarks
  int landmark_dim = 0;
  std::optional<VoxelGrid> voxel;
};

struct PerturbedRollout {
  Eigen::VectorXd delta_theta;
  Trajectory trajectory;
};

// One (delta theta, delta x_t) training pair.
struct DerivativeSample {
  int t = 0;
  Eigen::VectorXd delta_theta;
  Eigen::VectorXd delta_x;
  double magnitude = 0.0;
};

// Finite differences x_t(theta + delta) - x_t(theta) for a set of perturbed
// rollouts against one source trajectory (angles only).
struct DerivativeDataset {
  // n x m, one perturbation per row
  Eigen::MatrixXd delta_theta;
  // per perturbation, (T+1) x 3
  std::vector<StateMatrix> delta_x;
  // re-aligning shift applied to each perturbed rollout
  std::vector<int> shifts;

  int size() const { return static_cast<int>(delta_theta.rows()); }
  int param_dim() const { return static_cast<int>(delta_theta.cols()); }
  int steps() const { return delta_x.empty() ? 0 : static_cast<int>(delta_x.front().rows()) - 1; }

  DerivativeSample sample(int k, int t) const;
  // n x 3 state changes at timestep t
  Eigen::MatrixXd TargetsAt(int t) const;
};

DerivativeDataset BuildSamples(const Trajectory& source,
                               std::span<const PerturbedRollout> perturbed,
                               const PreprocessConfig& preprocess = PreprocessConfig());

// delta_x / ||delta_theta||
Eigen::VectorXd DirectionalDerivative(const DerivativeSample& sample);

// Per-timestep d x m matrices whose column j is the directional derivative
// along basis direction j.
struct JacobianStack {
  std::vector<Eigen::MatrixXd> blocks;

  int steps() const { return static_cast<int>(blocks.size()) - 1; }
};

using RolloutFn = std::function<Trajectory(const Eigen::VectorXd& theta)>;

// Finite differences along each scaled basis step; central differences use
// two rollouts per direction.
JacobianStack BuildJacobianStack(const RolloutFn& rollout, const Eigen::VectorXd& theta,
                                 const DirectionBasis& basis, bool central = true);

// Delta_t (Lambda^T delta_theta)
Eigen::VectorXd ReconstructLinear(const JacobianStack& stack, const DirectionBasis& basis,
                                  const Eigen::VectorXd& delta_theta, int t);

// d independent scalar GPs mapping delta theta to delta x at one timestep.
struct TimestepModel {
  int t = 0;
  std::vector<GaussianProcess<double>> outputs;
};

struct StatePrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

StatePrediction Predict(const TimestepModel& model, const Eigen::VectorXd& delta_theta);

struct FitConfig {
  GpOptions gp;
  int stride = 10;
  // add (0, 0) as a training point at every timestep
  bool pin_origin = true;
  int workers = 1;
};

// Timesteps 0, stride, 2 stride, ... plus the final step.
std::vector<int> TrainedTimesteps(int steps, int stride);

TimestepModel FitGp(const DerivativeDataset& dataset, int t, const GpOptions& options,
                    bool pin_origin = true);

// The family of per-timestep maps g_t(delta theta) = delta x_t.
struct SensitivityModel {
  std::vector<TimestepModel> models;
  int stride = 1;
  int steps = 0;
  Eigen::VectorXd nominal_theta;
  // source trajectory angles, (T+1) x 3
  StateMatrix source_angles;
  // perturbations the maps were trained on (n x m)
  Eigen::MatrixXd training_delta_theta;

  // throws kIndex for an untrained timestep
  const TimestepModel& At(int t) const;
  bool Has(int t) const;
  StatePrediction Predict(int t, const Eigen::VectorXd& delta_theta) const;
};

SensitivityModel FitSensitivityModel(const DerivativeDataset& dataset,
                                     const Trajectory& source,
                                     const Eigen::VectorXd& nominal_theta,
                                     const FitConfig& config);

// 1 - sum (y - p)^2 / sum (y - mean y)^2
double GpScore(std::span<const double> y_true, std::span<const double> y_pred);

// <pred, truth> / (||pred|| ||truth||)
double CosineAlignment(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

inline constexpr int kCosineBins = 20;

struct TimestepMetrics {
  int t = 0;
  double mse = 0.0;
  double score = 0.0;
  double cos_mean = 0.0;
  double cos_median = 0.0;
  int cos_count = 0;
  // counts over [-1, 1] in kCosineBins equal bins
  std::array<int, kCosineBins> cos_histogram{};
};

struct MetricsRow {
  std::string task;
  double mse_avg = 0.0;
  double score_avg = 0.0;
  double cos_avg = 0.0;
  int timesteps = 0;
};

struct Evaluation {
  MetricsRow row;
  std::vector<TimestepMetrics> per_timestep;
  // held-out predictions (n x 3) at each of prediction_timesteps
  std::vector<int> prediction_timesteps;
  std::vector<Eigen::MatrixXd> predictions;
};

// Scores the model on held-out perturbations whose true state changes are in
// `truth`. Timesteps where the truth has zero variance are skipped, as are
// cosine terms with a zero vector.
Evaluation Evaluate(const SensitivityModel& model, const DerivativeDataset& truth,
                    const std::string& task, int workers = 1);

}  // namespace physderiv

#endif  // PHYSDERIV_SENSITIVITY_H_
