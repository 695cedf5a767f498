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

#ifndef PHYSDERIV_PERTURB_H_
#define PHYSDERIV_PERTURB_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace physderiv {

enum class PerturbationScheme { kGaussian, kUniform, kBasis };

std::string_view SchemeName(PerturbationScheme scheme);
PerturbationScheme ParseScheme(std::string_view name);

// Parameters sharing one exponential rate and one Gaussian scale
// (the 2-norm of their nominal sub-vector).
struct ParameterGroup {
  std::vector<int> indices;
  double lambda_rate = 100.0;
};

struct ParameterRange {
  double low = 0.0;
  double high = 0.0;
};

struct PerturbationPlan {
  PerturbationScheme scheme = PerturbationScheme::kGaussian;
  Eigen::VectorXd nominal;
  // gaussian: used when `groups` is empty (single group over all of theta)
  double lambda_rate = 100.0;
  std::vector<ParameterGroup> groups;
  // uniform: absolute ranges for theta'; nullopt keeps the parameter nominal
  std::vector<std::optional<ParameterRange>> ranges;
  int count = 1;
  std::uint64_t seed = 0;
};

// Samples are stored one per row (count x m).
struct GaussianDraws {
  Eigen::MatrixXd deltas;
  // exponential scale e drawn per sample and group (count x groups)
  Eigen::MatrixXd scales;
};

// e ~ Exp(lambda) per group, then delta ~ N(0, (e * ||theta_group||)^2 I).
GaussianDraws SampleGaussianWithScales(const PerturbationPlan& plan);
Eigen::MatrixXd SampleGaussian(const PerturbationPlan& plan);

// theta' ~ U(range) per parameter, delta = theta' - nominal.
Eigen::MatrixXd SampleUniform(const PerturbationPlan& plan);

// Dispatches on plan.scheme (basis plans return the scaled basis steps).
Eigen::MatrixXd SamplePlan(const PerturbationPlan& plan);

// One plan per point of the cartesian lambda grid over the plan's groups,
// each with `per_combination` samples and a derived seed.
std::vector<PerturbationPlan> LambdaSweepPlans(const PerturbationPlan& base,
                                               const std::vector<double>& lambdas,
                                               int per_combination);

// Orthonormal directions (columns of lambda) and the scaled finite-difference
// steps scale * lambda.
struct DirectionBasis {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd steps;
};

DirectionBasis BasisDirections(int m, double scale);
DirectionBasis RandomOrthonormalBasis(int m, double scale, std::uint64_t seed);

bool IsOrthonormal(const Eigen::MatrixXd& lambda, double tolerance = 1e-10);

// Default finite-difference step: 1e-2 * ||theta||.
double DefaultStepScale(const Eigen::VectorXd& theta);

}  // namespace physderiv

#endif  // PHYSDERIV_PERTURB_H_
