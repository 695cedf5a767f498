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

#ifndef PHYSDERIV_GAUSSIAN_PROCESS_H_
#define PHYSDERIV_GAUSSIAN_PROCESS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/error.h"

namespace physderiv {

template <typename Scalar>
struct GpHyperparameters {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lengthscales;
  Scalar signal_variance = Scalar(1);
  Scalar noise_variance = Scalar(1e-4);
};

struct GpOptions {
  // optimize hyperparameters by marginal-likelihood ascent; otherwise
  // `fixed` (in data units) is used as is
  bool optimize = true;
  int restarts = 2;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  GpHyperparameters<double> fixed;
  // bounds on the standardized log hyperparameters
  double min_lengthscale = 1e-2;
  double max_lengthscale = 1e3;
  double min_noise_std = 1e-6;
  double max_noise_std = 1.0;
};

template <typename Scalar>
struct GpPrediction {
  Scalar mean = Scalar(0);
  // predictive variance of a new observation (includes noise)
  Scalar variance = Scalar(0);
};

// Exact GP regression with a zero prior mean and an ARD squared-exponential
// kernel k(a, b) = s^2 exp(-1/2 sum_d (a_d - b_d)^2 / l_d^2).
//
// Inputs are divided by their per-dimension standard deviation and targets by
// their root mean square before fitting; hyperparameters are reported in data
// units. The kernel matrix is factorized with Cholesky, adding jitter starting
// at 1e-8 and growing by 10x up to 1e-4 if the factorization fails.
template <typename Scalar = double>
class GaussianProcess {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Hyperparameters = GpHyperparameters<Scalar>;

  void Fit(const Matrix& inputs, const Vector& targets, const GpOptions& options) {
    Standardize(inputs, targets);
    Vector params;
    if (options.optimize) {
      params = Optimize(options);
    } else {
      params = ToLogParams(options.fixed);
    }
    Factorize(params);
  }

  void FitFixed(const Matrix& inputs, const Vector& targets,
                const Hyperparameters& hyper) {
    Standardize(inputs, targets);
    Factorize(ToLogParams(hyper));
  }

  GpPrediction<Scalar> Predict(const Vector& x) const {
    if (x.size() != inputs_.cols()) {
      throw Error(ErrorKind::kIndex, "prediction input has the wrong dimension");
    }
    const Vector z = x.cwiseQuotient(input_scale_);
    const Vector k = KernelColumn(z);
    GpPrediction<Scalar> p;
    p.mean = k.dot(alpha_) * output_scale_;
    const Vector v = chol_.matrixL().solve(k);
    const Scalar latent = std::max(Scalar(0), signal_var_ - v.squaredNorm());
    p.variance = (latent + noise_var_) * output_scale_ * output_scale_;
    return p;
  }

  // log p(y | X) of the standardized problem at the fitted hyperparameters
  Scalar log_marginal_likelihood() const { return lml_; }

  Hyperparameters hyperparameters() const {
    Hyperparameters h;
    h.lengthscales = lengthscales_.cwiseProduct(input_scale_);
    h.signal_variance = signal_var_ * output_scale_ * output_scale_;
    h.noise_variance = noise_param_ * output_scale_ * output_scale_;
    return h;
  }

  Scalar jitter() const { return jitter_; }
  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index input_dim() const { return inputs_.cols(); }

  // Log marginal likelihood of the standardized data at log parameters
  // (log l_1..log l_p, log s, log sigma_n) and its gradient.
  Scalar LogLikelihoodAndGradient(const Vector& params, Vector* gradient) const {
    const Eigen::Index n = inputs_.rows(), p = inputs_.cols();
    const Vector ell = params.head(p).array().exp();
    const Scalar sf2 = std::exp(Scalar(2) * params(p));
    const Scalar sn2 = std::exp(Scalar(2) * params(p + 1));
    const Matrix kf = KernelMatrix(ell, sf2);

    Matrix k = kf;
    Scalar jitter = Scalar(1e-8);
    Eigen::LLT<Matrix> llt;
    for (;;) {
      k.diagonal() = kf.diagonal().array() + sn2 + jitter;
      llt.compute(k);
      if (llt.info() == Eigen::Success) break;
      jitter *= Scalar(10);
      if (jitter > Scalar(1e-4)) return -std::numeric_limits<Scalar>::infinity();
    }
    const Vector alpha = llt.solve(targets_);
    const Scalar log_det = Scalar(2) * llt.matrixLLT().diagonal().array().log().sum();
    const Scalar lml = Scalar(-0.5) * targets_.dot(alpha) - Scalar(0.5) * log_det -
                       Scalar(0.5) * Scalar(n) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
    if (gradient != nullptr) {
      // W = alpha alpha^T - K^{-1}, dL/dp = 1/2 tr(W dK/dp)
      Matrix w = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
      gradient->resize(p + 2);
      for (Eigen::Index d = 0; d < p; ++d) {
        Scalar g = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar diff = inputs_(i, d) - inputs_(j, d);
            g += w(i, j) * kf(i, j) * diff * diff;
          }
        }
        (*gradient)(d) = Scalar(0.5) * g / (ell(d) * ell(d));
      }
      (*gradient)(p) = w.cwiseProduct(kf).sum();
      (*gradient)(p + 1) = w.trace() * sn2;
    }
    return lml;
  }

  // training data in data units
  Matrix inputs() const { return inputs_ * input_scale_.asDiagonal(); }
  Vector targets() const { return targets_ * output_scale_; }

 private:
  void Standardize(const Matrix& inputs, const Vector& targets) {
    if (inputs.rows() < 2) {
      throw Error(ErrorKind::kInsufficientData, "GP fit needs at least 2 samples");
    }
    if (inputs.rows() != targets.size()) {
      throw Error(ErrorKind::kDataset, "GP inputs and targets differ in length");
    }
    if (!inputs.allFinite() || !targets.allFinite()) {
      throw Error(ErrorKind::kDataset, "GP training data is not finite");
    }
    const Eigen::Index n = inputs.rows();
    input_scale_.resize(inputs.cols());
    for (Eigen::Index d = 0; d < inputs.cols(); ++d) {
      const Scalar mean = inputs.col(d).mean();
      const Scalar var = (inputs.col(d).array() - mean).square().sum() / Scalar(n);
      input_scale_(d) = var > Scalar(0) ? std::sqrt(var) : Scalar(1);
    }
    const Scalar rms = std::sqrt(targets.squaredNorm() / Scalar(n));
    output_scale_ = rms > Scalar(0) ? rms : Scalar(1);
    inputs_ = inputs * input_scale_.cwiseInverse().asDiagonal();
    targets_ = targets / output_scale_;
  }

  Vector ToLogParams(const GpHyperparameters<double>& h) const {
    const Eigen::Index p = inputs_.cols();
    if (h.lengthscales.size() != p) {
      throw Error(ErrorKind::kConfig, "fixed GP lengthscales have the wrong dimension");
    }
    if (!(h.signal_variance > 0.0) || !(h.noise_variance > 0.0) ||
        !(h.lengthscales.array() > 0.0).all()) {
      throw Error(ErrorKind::kConfig, "GP hyperparameters must be positive");
    }
    Vector params(p + 2);
    for (Eigen::Index d = 0; d < p; ++d) {
      params(d) = std::log(Scalar(h.lengthscales(d)) / input_scale_(d));
    }
    params(p) = Scalar(0.5) * std::log(Scalar(h.signal_variance) / (output_scale_ * output_scale_));
    params(p + 1) = Scalar(0.5) * std::log(Scalar(h.noise_variance) / (output_scale_ * output_scale_));
    return params;
  }

  Matrix KernelMatrix(const Vector& ell, Scalar sf2) const {
    const Matrix z = inputs_ * ell.cwiseInverse().asDiagonal();
    const Vector sq = z.rowwise().squaredNorm();
    Matrix d2 = (sq.replicate(1, z.rows()) + sq.transpose().replicate(z.rows(), 1)) -
                Scalar(2) * z * z.transpose();
    return sf2 * (Scalar(-0.5) * d2.cwiseMax(Scalar(0))).array().exp().matrix();
  }

  Vector KernelColumn(const Vector& z) const {
    Vector k(inputs_.rows());
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
      const Scalar d2 = (inputs_.row(i).transpose() - z).cwiseQuotient(lengthscales_).squaredNorm();
      k(i) = signal_var_ * std::exp(Scalar(-0.5) * d2);
    }
    return k;
  }

  void Bounds(const GpOptions& options, Vector* lower, Vector* upper) const {
    const Eigen::Index p = inputs_.cols();
    lower->resize(p + 2);
    upper->resize(p + 2);
    lower->head(p).setConstant(std::log(Scalar(options.min_lengthscale)));
    upper->head(p).setConstant(std::log(Scalar(options.max_lengthscale)));
    (*lower)(p) = std::log(Scalar(1e-3));
    (*upper)(p) = std::log(Scalar(1e3));
    (*lower)(p + 1) = std::log(Scalar(options.min_noise_std));
    (*upper)(p + 1) = std::log(Scalar(options.max_noise_std));
  }

  // projected BFGS ascent with Armijo backtracking from one start point
  Vector Ascend(Vector x, const Vector& lower, const Vector& upper, int max_iterations,
                Scalar* value) const {
    const Eigen::Index dim = x.size();
    auto project = [&](const Vector& v) { return v.cwiseMax(lower).cwiseMin(upper).eval(); };
    x = project(x);
    Vector grad;
    Scalar f = LogLikelihoodAndGradient(x, &grad);
    Matrix h = Matrix::Identity(dim, dim);
    for (int it = 0; it < max_iterations && std::isfinite(f); ++it) {
      Vector direction = h * grad;
      if (direction.dot(grad) <= Scalar(0)) {
        h.setIdentity();
        direction = grad;
      }
      const Scalar dmax = direction.cwiseAbs().maxCoeff();
      if (dmax > Scalar(2)) direction *= Scalar(2) / dmax;
      Scalar step = 1;
      Vector next, next_grad;
      Scalar next_f = -std::numeric_limits<Scalar>::infinity();
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        next = project(x + step * direction);
        next_f = LogLikelihoodAndGradient(next, &next_grad);
        if (std::isfinite(next_f) &&
            next_f >= f + Scalar(1e-4) * grad.dot(next - x)) {
          accepted = true;
          break;
        }
        step *= Scalar(0.5);
      }
      if (!accepted) break;
      const Vector s = next - x;
      const Vector y = grad - next_grad;  // ascent: curvature of -f
      const Scalar improvement = next_f - f;
      x = next;
      f = next_f;
      grad = next_grad;
      const Scalar sy = s.dot(y);
      if (sy > Scalar(1e-12)) {
        const Scalar rho = Scalar(1) / sy;
        const Matrix i = Matrix::Identity(dim, dim);
        h = (i - rho * s * y.transpose()) * h * (i - rho * y * s.transpose()) +
            rho * s * s.transpose();
      }
      if (std::abs(improvement) < Scalar(1e-9) * (Scalar(1) + std::abs(f))) break;
      const Vector projected = project(x + grad) - x;
      if (projected.cwiseAbs().maxCoeff() < Scalar(1e-6)) break;
    }
    *value = f;
    return x;
  }

  Vector Optimize(const GpOptions& options) const {
    const Eigen::Index p = inputs_.cols();
    Vector lower, upper;
    Bounds(options, &lower, &upper);

    std::vector<Vector> starts;
    Vector start(p + 2);
    start.head(p).setZero();
    start(p) = 0;
    start(p + 1) = std::log(Scalar(1e-2));
    starts.push_back(start);
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int r = 0; r < options.restarts; ++r) {
      Vector s(p + 2);
      for (Eigen::Index d = 0; d < p; ++d) {
        s(d) = std::log(Scalar(0.1)) + Scalar(unit(rng)) * std::log(Scalar(100));
      }
      s(p) = std::log(Scalar(0.1)) + Scalar(unit(rng)) * std::log(Scalar(100));
      s(p + 1) = std::log(Scalar(1e-4)) + Scalar(unit(rng)) * std::log(Scalar(1e3));
      starts.push_back(s);
    }

    Vector best;
    Scalar best_value = -std::numeric_limits<Scalar>::infinity();
    for (const Vector& s : starts) {
      Scalar value;
      Vector candidate = Ascend(s, lower, upper, options.max_iterations, &value);
      if (value > best_value) {
        best_value = value;
        best = candidate;
      }
    }
    if (!std::isfinite(best_value)) {
      throw Error(ErrorKind::kFit, "marginal likelihood is not finite at any restart");
    }
    return best;
  }

  void Factorize(const Vector& params) {
    const Eigen::Index p = inputs_.cols();
    lengthscales_ = params.head(p).array().exp();
    signal_var_ = std::exp(Scalar(2) * params(p));
    const Scalar sn2 = std::exp(Scalar(2) * params(p + 1));
    const Matrix kf = KernelMatrix(lengthscales_, signal_var_);
    Matrix k = kf;
    jitter_ = Scalar(1e-8);
    for (;;) {
      k.diagonal() = kf.diagonal().array() + sn2 + jitter_;
      chol_.compute(k);
      if (chol_.info() == Eigen::Success) break;
      jitter_ *= Scalar(10);
      if (jitter_ > Scalar(1e-4)) {
        throw Error(ErrorKind::kFit, "kernel matrix is not positive definite after jitter");
      }
    }
    noise_param_ = sn2;
    noise_var_ = sn2 + jitter_;
    alpha_ = chol_.solve(targets_);
    const Scalar log_det = Scalar(2) * chol_.matrixLLT().diagonal().array().log().sum();
    lml_ = Scalar(-0.5) * targets_.dot(alpha_) - Scalar(0.5) * log_det -
           Scalar(0.5) * Scalar(inputs_.rows()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
  }

  Matrix inputs_;
  Vector targets_;
  Vector input_scale_;
  Scalar output_scale_ = 1;
  Vector lengthscales_;
  Scalar signal_var_ = 1;
  Scalar noise_param_ = 0;
  Scalar noise_var_ = 0;
  Scalar jitter_ = 0;
  Scalar lml_ = 0;
  Vector alpha_;
  Eigen::LLT<Matrix> chol_;
};

}  // namespace physderiv

#endif  // PHYSDERIV_GAUSSIAN_PROCESS_H_
