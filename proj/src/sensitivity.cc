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

#include "physderiv/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "physderiv/error.h"
#include "physderiv/parallel.h"

namespace physderiv {

DerivativeSample DerivativeDataset::sample(int k, int t) const {
  if (k < 0 || k >= size() || t < 0 || t > steps()) {
    throw Error(ErrorKind::kIndex, "sample index out of range");
  }
  DerivativeSample s;
  s.t = t;
  s.delta_theta = delta_theta.row(k).transpose();
  s.delta_x = delta_x[static_cast<std::size_t>(k)].row(t).transpose();
  s.magnitude = s.delta_theta.norm();
  return s;
}

Eigen::MatrixXd DerivativeDataset::TargetsAt(int t) const {
  if (t < 0 || t > steps()) throw Error(ErrorKind::kIndex, "timestep out of range");
  Eigen::MatrixXd y(size(), kStateDim);
  for (int k = 0; k < size(); ++k) y.row(k) = delta_x[static_cast<std::size_t>(k)].row(t);
  return y;
}

DerivativeDataset BuildSamples(const Trajectory& source,
                               std::span<const PerturbedRollout> perturbed,
                               const PreprocessConfig& preprocess) {
  source.Validate();
  if (perturbed.empty()) throw Error(ErrorKind::kDataset, "no perturbed rollouts");
  const Eigen::Index m = perturbed.front().delta_theta.size();

  const Trajectory reference =
      preprocess.voxel ? VoxelizeTrajectory(source, *preprocess.voxel) : source;

  DerivativeDataset dataset;
  dataset.delta_theta.resize(static_cast<Eigen::Index>(perturbed.size()), m);
  dataset.delta_x.reserve(perturbed.size());
  dataset.shifts.reserve(perturbed.size());
  for (std::size_t k = 0; k < perturbed.size(); ++k) {
    const PerturbedRollout& p = perturbed[k];
    if (p.delta_theta.size() != m) {
      throw Error(ErrorKind::kDataset, "perturbations differ in dimension");
    }
    if (!(p.delta_theta.norm() > 0.0)) {
      throw Error(ErrorKind::kInvalidSample, "perturbation " + std::to_string(k) + " is zero");
    }
    if (p.trajectory.angles.rows() != source.angles.rows()) {
      throw Error(ErrorKind::kDataset,
                  "perturbed rollout " + std::to_string(k) + " differs in length");
    }
    if (std::abs(p.trajectory.dt - source.dt) > 1e-12 * source.dt) {
      throw Error(ErrorKind::kDataset, "perturbed rollout " + std::to_string(k) + " differs in dt");
    }
    Trajectory traj = p.trajectory;
    int shift = 0;
    if (preprocess.align) {
      const DelayEstimate delay =
          preprocess.method == AlignMethod::kCorrelation
              ? EstimateDelay(source, traj, preprocess.max_lag)
              : AlignZeroCrossing(source, traj, preprocess.landmark_dim);
      shift = delay.tau_star;
      if (shift != 0) traj = ApplyShift(traj, shift);
    }
    if (preprocess.voxel) traj = VoxelizeTrajectory(traj, *preprocess.voxel);
    dataset.delta_theta.row(static_cast<Eigen::Index>(k)) = p.delta_theta.transpose();
    dataset.delta_x.push_back(traj.angles - reference.angles);
    dataset.shifts.push_back(shift);
  }
  return dataset;
}

Eigen::VectorXd DirectionalDerivative(const DerivativeSample& sample) {
  const double norm = sample.delta_theta.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::kInvalidSample, "zero-norm perturbation");
  return sample.delta_x / norm;
}

JacobianStack BuildJacobianStack(const RolloutFn& rollout, const Eigen::VectorXd& theta,
                                 const DirectionBasis& basis, bool central) {
  const Eigen::Index m = theta.size();
  if (basis.lambda.rows() != m || basis.steps.rows() != m || basis.steps.cols() != m) {
    throw Error(ErrorKind::kConfig, "basis dimension does not match theta");
  }
  const Trajectory nominal = rollout(theta);
  const Eigen::Index rows = nominal.angles.rows();
  JacobianStack stack;
  stack.blocks.assign(static_cast<std::size_t>(rows), Eigen::MatrixXd::Zero(kStateDim, m));
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd step = basis.steps.col(j);
    const double h = step.norm();
    if (!(h > 0.0)) throw Error(ErrorKind::kConfig, "basis step has zero length");
    const Trajectory plus = rollout(theta + step);
    StateMatrix diff;
    double denom;
    if (central) {
      const Trajectory minus = rollout(theta - step);
      diff = plus.angles - minus.angles;
      denom = 2.0 * h;
    } else {
      diff = plus.angles - nominal.angles;
      denom = h;
    }
    for (Eigen::Index t = 0; t < rows; ++t) {
      stack.blocks[static_cast<std::size_t>(t)].col(j) = diff.row(t).transpose() / denom;
    }
  }
  return stack;
}

Eigen::VectorXd ReconstructLinear(const JacobianStack& stack, const DirectionBasis& basis,
                                  const Eigen::VectorXd& delta_theta, int t) {
  if (t < 0 || t > stack.steps()) {
    throw Error(ErrorKind::kIndex, "timestep " + std::to_string(t) + " not in the stack");
  }
  if (!IsOrthonormal(basis.lambda)) {
    throw Error(ErrorKind::kConfig, "direction basis is not orthonormal");
  }
  if (delta_theta.size() != basis.lambda.rows()) {
    throw Error(ErrorKind::kConfig, "perturbation dimension does not match the basis");
  }
  return stack.blocks[static_cast<std::size_t>(t)] * (basis.lambda.transpose() * delta_theta);
}

StatePrediction Predict(const TimestepModel& model, const Eigen::VectorXd& delta_theta) {
  StatePrediction p;
  const Eigen::Index d = static_cast<Eigen::Index>(model.outputs.size());
  p.mean.resize(d);
  p.stddev.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const GpPrediction<double> g = model.outputs[static_cast<std::size_t>(i)].Predict(delta_theta);
    p.mean(i) = g.mean;
    p.stddev(i) = std::sqrt(g.variance);
  }
  return p;
}

std::vector<int> TrainedTimesteps(int steps, int stride) {
  if (stride < 1) throw Error(ErrorKind::kConfig, "stride must be >= 1");
  std::vector<int> ts;
  for (int t = 0; t <= steps; t += stride) ts.push_back(t);
  if (ts.back() != steps) ts.push_back(steps);
  return ts;
}

TimestepModel FitGp(const DerivativeDataset& dataset, int t, const GpOptions& options,
                    bool pin_origin) {
  if (t < 0 || t > dataset.steps()) throw Error(ErrorKind::kIndex, "timestep out of range");
  const int n = dataset.size();
  if (n < 2) throw Error(ErrorKind::kInsufficientData, "GP fit needs at least 2 samples");
  const Eigen::Index m = dataset.param_dim();
  const Eigen::Index rows = n + (pin_origin ? 1 : 0);

  Eigen::MatrixXd inputs(rows, m);
  Eigen::MatrixXd targets(rows, kStateDim);
  inputs.topRows(n) = dataset.delta_theta;
  targets.topRows(n) = dataset.TargetsAt(t);
  if (pin_origin) {
    inputs.row(n).setZero();
    targets.row(n).setZero();
  }

  TimestepModel model;
  model.t = t;
  model.outputs.resize(kStateDim);
  for (int d = 0; d < kStateDim; ++d) {
    GpOptions opts = options;
    opts.seed = options.seed + 3 * static_cast<std::uint64_t>(t) + static_cast<std::uint64_t>(d);
    model.outputs[static_cast<std::size_t>(d)].Fit(inputs, targets.col(d), opts);
  }
  return model;
}

const TimestepModel& SensitivityModel::At(int t) const {
  auto it = std::lower_bound(models.begin(), models.end(), t,
                             [](const TimestepModel& m, int value) { return m.t < value; });
  if (it == models.end() || it->t != t) {
    throw Error(ErrorKind::kIndex, "no model trained at timestep " + std::to_string(t));
  }
  return *it;
}

bool SensitivityModel::Has(int t) const {
  return std::any_of(models.begin(), models.end(),
                     [t](const TimestepModel& m) { return m.t == t; });
}

StatePrediction SensitivityModel::Predict(int t, const Eigen::VectorXd& delta_theta) const {
  return physderiv::Predict(At(t), delta_theta);
}

SensitivityModel FitSensitivityModel(const DerivativeDataset& dataset,
                                     const Trajectory& source,
                                     const Eigen::VectorXd& nominal_theta,
                                     const FitConfig& config) {
  if (dataset.size() < 2) {
    throw Error(ErrorKind::kInsufficientData, "GP fit needs at least 2 samples");
  }
  if (source.angles.rows() != dataset.steps() + 1) {
    throw Error(ErrorKind::kDataset, "source trajectory does not match the dataset");
  }
  SensitivityModel model;
  model.stride = config.stride;
  model.steps = dataset.steps();
  model.nominal_theta = nominal_theta;
  model.source_angles = source.angles;
  model.training_delta_theta = dataset.delta_theta;
  const std::vector<int> ts = TrainedTimesteps(dataset.steps(), config.stride);
  model.models.resize(ts.size());
  ParallelFor(static_cast<int>(ts.size()), config.workers, [&](int i) {
    model.models[static_cast<std::size_t>(i)] =
        FitGp(dataset, ts[static_cast<std::size_t>(i)], config.gp, config.pin_origin);
  });
  return model;
}

double GpScore(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorKind::kDataset, "score inputs differ in length");
  }
  if (y_true.size() < 2) throw Error(ErrorKind::kInsufficientData, "score needs >= 2 points");
  double mean = 0.0;
  for (double y : y_true) mean += y;
  mean /= static_cast<double>(y_true.size());
  double residual = 0.0, total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    residual += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    total += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kDegenerateScore, "true values have zero variance");
  return 1.0 - residual / total;
}

double CosineAlignment(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) {
    throw Error(ErrorKind::kDataset, "cosine inputs differ in dimension");
  }
  const double np = pred.norm(), nt = truth.norm();
  if (!(np > 0.0) || !(nt > 0.0)) {
    throw Error(ErrorKind::kUndefinedAlignment, "cosine of a zero vector");
  }
  return std::clamp(pred.dot(truth) / (np * nt), -1.0, 1.0);
}

namespace {

bool SameRow(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
  return (a.row(i).array() == b.row(j).array()).all();
}

TimestepMetrics ScoreTimestep(int t, const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred) {
  TimestepMetrics out;
  out.t = t;
  const Eigen::Index n = truth.rows();
  double variance_sum = 0.0, score_sum = 0.0;
  int score_dims = 0;
  for (Eigen::Index d = 0; d < truth.cols(); ++d) {
    const Eigen::VectorXd y = truth.col(d);
    const double var = (y.array() - y.mean()).square().sum() / static_cast<double>(n);
    variance_sum += var;
    if (var > 0.0) {
      const Eigen::VectorXd p = pred.col(d);
      score_sum += GpScore(std::span<const double>(y.data(), y.size()),
                           std::span<const double>(p.data(), p.size()));
      ++score_dims;
    }
  }
  out.score = score_dims > 0 ? score_sum / score_dims : 0.0;
  out.mse = variance_sum > 0.0
                ? (pred - truth).squaredNorm() / (static_cast<double>(n) * variance_sum)
                : 0.0;

  std::vector<double> cosines;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd p = pred.row(k).transpose();
    const Eigen::VectorXd y = truth.row(k).transpose();
    if (!(p.norm() > 0.0) || !(y.norm() > 0.0)) continue;
    const double c = CosineAlignment(p, y);
    cosines.push_back(c);
    const int bin = std::clamp(static_cast<int>((c + 1.0) / 2.0 * kCosineBins), 0, kCosineBins - 1);
    ++out.cos_histogram[static_cast<std::size_t>(bin)];
  }
  out.cos_count = static_cast<int>(cosines.size());
  if (!cosines.empty()) {
    double sum = 0.0;
    for (double c : cosines) sum += c;
    out.cos_mean = sum / static_cast<double>(cosines.size());
    std::sort(cosines.begin(), cosines.end());
    const std::size_t mid = cosines.size() / 2;
    out.cos_median = cosines.size() % 2 == 1 ? cosines[mid]
                                             : 0.5 * (cosines[mid - 1] + cosines[mid]);
  }
  return out;
}

}  // namespace

Evaluation Evaluate(const SensitivityModel& model, const DerivativeDataset& truth,
                    const std::string& task, int workers) {
  if (truth.size() == 0) throw Error(ErrorKind::kConfig, "held-out set is empty");
  if (truth.param_dim() != model.training_delta_theta.cols()) {
    throw Error(ErrorKind::kDataset, "held-out perturbations differ in dimension");
  }
  for (Eigen::Index i = 0; i < truth.delta_theta.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.training_delta_theta.rows(); ++j) {
      if (SameRow(truth.delta_theta, i, model.training_delta_theta, j)) {
        throw Error(ErrorKind::kConfig, "held-out perturbation " + std::to_string(i) +
                                            " is also a training perturbation");
      }
    }
  }

  std::vector<int> ts;
  for (const TimestepModel& m : model.models) {
    if (m.t <= truth.steps()) ts.push_back(m.t);
  }
  std::vector<Eigen::MatrixXd> predictions(ts.size());
  std::vector<std::optional<TimestepMetrics>> metrics(ts.size());
  ParallelFor(static_cast<int>(ts.size()), workers, [&](int i) {
    const int t = ts[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd y = truth.TargetsAt(t);
    Eigen::MatrixXd p(y.rows(), y.cols());
    const TimestepModel& tm = model.At(t);
    for (int k = 0; k < truth.size(); ++k) {
      p.row(k) = Predict(tm, truth.delta_theta.row(k).transpose()).mean.transpose();
    }
    predictions[static_cast<std::size_t>(i)] = p;
    const double total_var = (y.rowwise() - y.colwise().mean()).squaredNorm();
    if (total_var > 0.0) metrics[static_cast<std::size_t>(i)] = ScoreTimestep(t, y, p);
  });

  Evaluation eval;
  eval.row.task = task;
  eval.predictions = std::move(predictions);
  eval.prediction_timesteps = ts;
  double mse = 0.0, score = 0.0, cos = 0.0;
  int cos_steps = 0;
  for (const auto& m : metrics) {
    if (!m) continue;
    eval.per_timestep.push_back(*m);
    mse += m->mse;
    score += m->score;
    if (m->cos_count > 0) {
      cos += m->cos_mean;
      ++cos_steps;
    }
  }
  const int used = static_cast<int>(eval.per_timestep.size());
  if (used == 0) throw Error(ErrorKind::kDegenerateScore, "no timestep has varying truth");
  eval.row.timesteps = used;
  eval.row.mse_avg = mse / used;
  eval.row.score_avg = score / used;
  eval.row.cos_avg = cos_steps > 0 ? cos / cos_steps : 0.0;
  return eval;
}

}  // namespace physderiv
