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

#include "physderiv/gaussian_process.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "physderiv/error.h"

namespace physderiv {
namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Data SmoothData(int n, int dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Data d{Eigen::MatrixXd(n, dims), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dims; ++j) d.x(i, j) = u(rng) * (j + 1);
    d.y(i) = std::sin(d.x(i, 0)) + (dims > 1 ? 0.3 * d.x(i, 1) : 0.0);
  }
  return d;
}

TEST(GaussianProcessTest, MatchesTextbookPosteriorMean) {
  const Data d = SmoothData(25, 2, 1);
  GpHyperparameters<double> h;
  h.lengthscales = Eigen::Vector2d(0.9, 2.5);
  h.signal_variance = 0.7;
  h.noise_variance = 1e-3;
  GaussianProcess<double> gp;
  gp.FitFixed(d.x, d.y, h);
  for (const Eigen::Vector2d q : {Eigen::Vector2d(0.1, -0.3), Eigen::Vector2d(1.5, 2.0)}) {
    const double effective_noise = h.noise_variance + gp.jitter() * d.y.squaredNorm() / 25.0;
    const double ref = oracle::GpPosteriorMean(d.x, d.y, h.lengthscales, h.signal_variance,
                                               effective_noise, q);
    EXPECT_NEAR(gp.Predict(q).mean, ref, 1e-8);
  }
}

TEST(GaussianProcessTest, ReportsHyperparametersInDataUnits) {
  const Data d = SmoothData(20, 2, 2);
  GpHyperparameters<double> h;
  h.lengthscales = Eigen::Vector2d(0.9, 2.5);
  h.signal_variance = 0.7;
  h.noise_variance = 1e-3;
  GaussianProcess<double> gp;
  gp.FitFixed(d.x, d.y, h);
  const auto back = gp.hyperparameters();
  EXPECT_NEAR((back.lengthscales - h.lengthscales).norm(), 0.0, 1e-12);
  EXPECT_NEAR(back.signal_variance, 0.7, 1e-12);
  EXPECT_NEAR(back.noise_variance, 1e-3, 1e-15);
}

TEST(GaussianProcessTest, GradientMatchesFiniteDifferences) {
  const Data d = SmoothData(30, 2, 3);
  GaussianProcess<double> gp;
  GpOptions options;
  options.optimize = false;
  options.fixed.lengthscales = Eigen::Vector2d(1.0, 1.0);
  gp.Fit(d.x, d.y, options);
  Eigen::VectorXd params(4);
  params << 0.2, -0.4, 0.1, -2.0;
  Eigen::VectorXd grad;
  gp.LogLikelihoodAndGradient(params, &grad);
  for (int i = 0; i < 4; ++i) {
    const double h = 1e-5;
    Eigen::VectorXd p = params, m = params;
    p(i) += h;
    m(i) -= h;
    const double fd = (gp.LogLikelihoodAndGradient(p, nullptr) -
                       gp.LogLikelihoodAndGradient(m, nullptr)) / (2 * h);
    EXPECT_NEAR(grad(i), fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST(GaussianProcessTest, OptimizationImprovesLikelihood) {
  const Data d = SmoothData(40, 1, 4);
  GpOptions fixed;
  fixed.optimize = false;
  fixed.fixed.lengthscales = Eigen::VectorXd::Constant(1, 10.0);
  fixed.fixed.signal_variance = 0.1;
  fixed.fixed.noise_variance = 0.1;
  GaussianProcess<double> a, b;
  a.Fit(d.x, d.y, fixed);
  b.Fit(d.x, d.y, GpOptions());
  EXPECT_GT(b.log_marginal_likelihood(), a.log_marginal_likelihood());
}

TEST(GaussianProcessTest, InterpolatesSmoothFunction) {
  const Data d = SmoothData(60, 1, 5);
  GaussianProcess<double> gp;
  gp.Fit(d.x, d.y, GpOptions());
  for (double q = -1.5; q <= 1.5; q += 0.25) {
    const auto p = gp.Predict(Eigen::VectorXd::Constant(1, q));
    EXPECT_NEAR(p.mean, std::sin(q), 1e-3);
    EXPECT_GT(p.variance, 0.0);
  }
}

TEST(GaussianProcessTest, VarianceGrowsAwayFromData) {
  const Data d = SmoothData(30, 1, 6);
  GaussianProcess<double> gp;
  gp.Fit(d.x, d.y, GpOptions());
  EXPECT_GT(gp.Predict(Eigen::VectorXd::Constant(1, 20.0)).variance,
            gp.Predict(Eigen::VectorXd::Constant(1, 0.0)).variance);
}

TEST(GaussianProcessTest, DeterministicUnderSeed) {
  const Data d = SmoothData(30, 2, 7);
  GaussianProcess<double> a, b;
  a.Fit(d.x, d.y, GpOptions());
  b.Fit(d.x, d.y, GpOptions());
  EXPECT_EQ(a.Predict(Eigen::Vector2d(0.3, 0.2)).mean, b.Predict(Eigen::Vector2d(0.3, 0.2)).mean);
}

TEST(GaussianProcessTest, HandlesDuplicateInputs) {
  Data d = SmoothData(10, 1, 8);
  d.x.row(1) = d.x.row(0);
  d.y(1) = d.y(0);
  GpHyperparameters<double> h;
  h.lengthscales = Eigen::VectorXd::Constant(1, 1.0);
  h.noise_variance = 1e-12;
  GaussianProcess<double> gp;
  gp.FitFixed(d.x, d.y, h);
  EXPECT_TRUE(std::isfinite(gp.Predict(d.x.row(0).transpose()).mean));
  EXPECT_GE(gp.jitter(), 0.0);
}

TEST(GaussianProcessTest, FloatInstantiation) {
  const Data d = SmoothData(20, 1, 9);
  GaussianProcess<float> gp;
  GpOptions options;
  options.restarts = 0;
  gp.Fit(d.x.cast<float>(), d.y.cast<float>(), options);
  EXPECT_NEAR(gp.Predict(Eigen::VectorXf::Constant(1, 0.5f)).mean, std::sin(0.5f), 2e-2f);
}

TEST(GaussianProcessTest, Errors) {
  GaussianProcess<double> gp;
  try {
    gp.Fit(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1), GpOptions());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientData);
  }
  const Data d = SmoothData(10, 2, 10);
  gp.Fit(d.x, d.y, GpOptions());
  try {
    gp.Predict(Eigen::VectorXd::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIndex);
  }
}

}  // namespace
}  // namespace physderiv
