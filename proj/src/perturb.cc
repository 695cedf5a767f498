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

#include "physderiv/perturb.h"

#include <random>
#include <string>

#include "physderiv/error.h"

namespace physderiv {

namespace {

std::vector<ParameterGroup> ResolveGroups(const PerturbationPlan& plan) {
  if (!plan.groups.empty()) return plan.groups;
  ParameterGroup all;
  all.lambda_rate = plan.lambda_rate;
  for (Eigen::Index i = 0; i < plan.nominal.size(); ++i) {
    all.indices.push_back(static_cast<int>(i));
  }
  return {all};
}

void CheckCommon(const PerturbationPlan& plan) {
  if (plan.count < 1) throw Error(ErrorKind::kConfig, "plan count must be >= 1");
  if (plan.nominal.size() < 1 || !plan.nominal.allFinite()) {
    throw Error(ErrorKind::kConfig, "plan nominal must be a finite, nonempty vector");
  }
}

}  // namespace

std::string_view SchemeName(PerturbationScheme scheme) {
  switch (scheme) {
    case PerturbationScheme::kGaussian:
      return "gaussian";
    case PerturbationScheme::kUniform:
      return "uniform";
    case PerturbationScheme::kBasis:
      return "basis";
  }
  return "unknown";
}

PerturbationScheme ParseScheme(std::string_view name) {
  if (name == "gaussian") return PerturbationScheme::kGaussian;
  if (name == "uniform") return PerturbationScheme::kUniform;
  if (name == "basis") return PerturbationScheme::kBasis;
  throw Error(ErrorKind::kConfig, "unknown perturbation scheme '" + std::string(name) + "'");
}

GaussianDraws SampleGaussianWithScales(const PerturbationPlan& plan) {
  CheckCommon(plan);
  if (plan.scheme != PerturbationScheme::kGaussian) {
    throw Error(ErrorKind::kConfig, "plan scheme is not gaussian");
  }
  const std::vector<ParameterGroup> groups = ResolveGroups(plan);
  const Eigen::Index m = plan.nominal.size();

  std::vector<double> group_norms;
  for (const ParameterGroup& group : groups) {
    if (!(group.lambda_rate > 0.0)) {
      throw Error(ErrorKind::kConfig, "exponential rate lambda must be positive");
    }
    double norm2 = 0.0;
    for (int i : group.indices) {
      if (i < 0 || i >= m) throw Error(ErrorKind::kConfig, "group index out of range");
      norm2 += plan.nominal(i) * plan.nominal(i);
    }
    if (norm2 == 0.0) {
      throw Error(ErrorKind::kConfig, "gaussian scale is zero for a parameter group");
    }
    group_norms.push_back(std::sqrt(norm2));
  }

  GaussianDraws draws;
  draws.deltas = Eigen::MatrixXd::Zero(plan.count, m);
  draws.scales.resize(plan.count, static_cast<Eigen::Index>(groups.size()));
  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < plan.count; ++s) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::exponential_distribution<double> exponential(groups[g].lambda_rate);
      const double e = exponential(rng);
      draws.scales(s, static_cast<Eigen::Index>(g)) = e;
      const double sigma = e * group_norms[g];
      for (int i : groups[g].indices) draws.deltas(s, i) = sigma * normal(rng);
    }
  }
  return draws;
}

Eigen::MatrixXd SampleGaussian(const PerturbationPlan& plan) {
  return SampleGaussianWithScales(plan).deltas;
}

Eigen::MatrixXd SampleUniform(const PerturbationPlan& plan) {
  CheckCommon(plan);
  if (plan.scheme != PerturbationScheme::kUniform) {
    throw Error(ErrorKind::kConfig, "plan scheme is not uniform");
  }
  const Eigen::Index m = plan.nominal.size();
  if (static_cast<Eigen::Index>(plan.ranges.size()) != m) {
    throw Error(ErrorKind::kConfig, "uniform plan needs one range entry per parameter");
  }
  bool any = false;
  for (const auto& range : plan.ranges) {
    if (!range) continue;
    any = true;
    if (!(range->low < range->high)) {
      throw Error(ErrorKind::kConfig, "uniform range needs low < high");
    }
  }
  if (!any) throw Error(ErrorKind::kConfig, "uniform plan perturbs no parameter");

  Eigen::MatrixXd deltas = Eigen::MatrixXd::Zero(plan.count, m);
  std::mt19937_64 rng(plan.seed);
  for (int s = 0; s < plan.count; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& range = plan.ranges[static_cast<std::size_t>(i)];
      if (!range) continue;
      std::uniform_real_distribution<double> uniform(range->low, range->high);
      deltas(s, i) = uniform(rng) - plan.nominal(i);
    }
  }
  return deltas;
}

Eigen::MatrixXd SamplePlan(const PerturbationPlan& plan) {
  switch (plan.scheme) {
    case PerturbationScheme::kGaussian:
      return SampleGaussian(plan);
    case PerturbationScheme::kUniform:
      return SampleUniform(plan);
    case PerturbationScheme::kBasis: {
      CheckCommon(plan);
      const int m = static_cast<int>(plan.nominal.size());
      return BasisDirections(m, DefaultStepScale(plan.nominal)).steps.transpose();
    }
  }
  throw Error(ErrorKind::kConfig, "unknown scheme");
}

std::vector<PerturbationPlan> LambdaSweepPlans(const PerturbationPlan& base,
                                               const std::vector<double>& lambdas,
                                               int per_combination) {
  if (lambdas.empty()) throw Error(ErrorKind::kConfig, "lambda sweep is empty");
  std::vector<ParameterGroup> groups = ResolveGroups(base);
  const std::size_t n_groups = groups.size();
  std::size_t combinations = 1;
  for (std::size_t g = 0; g < n_groups; ++g) combinations *= lambdas.size();

  std::vector<PerturbationPlan> plans;
  plans.reserve(combinations);
  for (std::size_t c = 0; c < combinations; ++c) {
    PerturbationPlan plan = base;
    plan.groups = groups;
    std::size_t rest = c;
    for (std::size_t g = 0; g < n_groups; ++g) {
      plan.groups[g].lambda_rate = lambdas[rest % lambdas.size()];
      rest /= lambdas.size();
    }
    plan.count = per_combination;
    plan.seed = base.seed + 7919 * (c + 1);
    plans.push_back(std::move(plan));
  }
  return plans;
}

DirectionBasis BasisDirections(int m, double scale) {
  if (m < 1) throw Error(ErrorKind::kConfig, "basis dimension must be >= 1");
  if (!(scale > 0.0)) throw Error(ErrorKind::kConfig, "basis step scale must be positive");
  DirectionBasis basis;
  basis.lambda = Eigen::MatrixXd::Identity(m, m);
  basis.steps = scale * basis.lambda;
  return basis;
}

DirectionBasis RandomOrthonormalBasis(int m, double scale, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::kConfig, "basis dimension must be >= 1");
  if (!(scale > 0.0)) throw Error(ErrorKind::kConfig, "basis step scale must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd gaussian(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) gaussian(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  DirectionBasis basis;
  basis.lambda = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  basis.steps = scale * basis.lambda;
  return basis;
}

bool IsOrthonormal(const Eigen::MatrixXd& lambda, double tolerance) {
  if (lambda.rows() != lambda.cols()) return false;
  const Eigen::MatrixXd gram = lambda.transpose() * lambda;
  return (gram - Eigen::MatrixXd::Identity(lambda.rows(), lambda.cols()))
             .cwiseAbs()
             .maxCoeff() <= tolerance;
}

double DefaultStepScale(const Eigen::VectorXd& theta) {
  const double norm = theta.norm();
  return norm > 0.0 ? 1e-2 * norm : 1e-2;
}

}  // namespace physderiv
