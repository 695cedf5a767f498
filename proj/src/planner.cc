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

#include "physderiv/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "physderiv/error.h"

namespace physderiv {

namespace {

constexpr int kScanPoints = 400;

// r(delta) = g(o + delta) - g(o) - target_change on the selected joints
class PlanResidual {
 public:
  PlanResidual(const SensitivityModel& model, const PlanningProblem& problem)
      : model_(model.At(problem.t_constraint)), dims_(problem.constraint_dims) {
    if (model.nominal_theta.size() < 1) {
      throw Error(ErrorKind::kConfig, "sensitivity model has no parameters");
    }
    if (dims_.empty()) dims_ = {0, 1, 2};
    for (int d : dims_) {
      if (d < 0 || d > 2) throw Error(ErrorKind::kConfig, "constraint joint must be 0, 1 or 2");
    }
    base_ = Eigen::VectorXd::Zero(model.nominal_theta.size());
    offset_ = problem.source_kp - model.nominal_theta(0);
    base_(0) = offset_;
    base_change_ = Predict(model_, base_).mean;
    const Vector3 source_state =
        problem.source_state
            ? *problem.source_state
            : Vector3(model.source_angles.row(problem.t_constraint).transpose() + base_change_);
    target_change_ = problem.x_target_t - source_state;

    const Eigen::VectorXd trained = model.training_delta_theta.col(0);
    lower_ = std::min(trained.minCoeff(), 0.0) - offset_;
    upper_ = std::max(trained.maxCoeff(), 0.0) - offset_;
  }

  Eigen::VectorXd operator()(double delta) const {
    Eigen::VectorXd in = base_;
    in(0) += delta;
    const Eigen::VectorXd change = Predict(model_, in).mean - base_change_;
    Eigen::VectorXd r(static_cast<Eigen::Index>(dims_.size()));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = change(dims_[i]) - target_change_(dims_[i]);
    }
    return r;
  }

  double Scalar(double delta) const { return (*this)(delta)(0); }
  double Squared(double delta) const { return (*this)(delta).squaredNorm(); }

  std::vector<double> Grid() const {
    std::vector<double> grid;
    for (int i = 0; i <= kScanPoints; ++i) {
      grid.push_back(lower_ + (upper_ - lower_) * i / kScanPoints);
    }
    if (lower_ <= 0.0 && upper_ >= 0.0) grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
  }

  std::size_t dims() const { return dims_.size(); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double target_change(std::size_t i) const { return target_change_(dims_[i]); }

 private:
  const TimestepModel& model_;
  std::vector<int> dims_;
  Eigen::VectorXd base_;
  double offset_ = 0.0;
  Eigen::VectorXd base_change_;
  Vector3 target_change_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

// bisection on a bracket with f(a) f(b) <= 0
double Bisect(const PlanResidual& r, double a, double b, int* iterations) {
  double fa = r.Scalar(a);
  if (fa == 0.0) return a;
  for (int it = 0; it < kPlanMaxIterations; ++it) {
    ++*iterations;
    const double mid = 0.5 * (a + b);
    const double fm = r.Scalar(mid);
    if (fm == 0.0 || 0.5 * (b - a) < kPlanTolerance) return mid;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

PlanSolution RootSearch(const PlanResidual& r) {
  const std::vector<double> grid = r.Grid();
  std::vector<double> values;
  values.reserve(grid.size());
  for (double d : grid) values.push_back(r.Scalar(d));

  PlanSolution solution;
  std::vector<double> roots;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] == 0.0) {
      roots.push_back(grid[i]);
    } else if (i + 1 < grid.size() && values[i + 1] != 0.0 &&
               (values[i] < 0.0) != (values[i + 1] < 0.0)) {
      roots.push_back(Bisect(r, grid[i], grid[i + 1], &solution.iterations));
    }
  }
  if (roots.empty()) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    std::ostringstream msg;
    msg << "no sign change in delta K_p bracket [" << r.lower() << ", " << r.upper()
        << "]; attainable state change is [" << *lo + r.target_change(0) << ", "
        << *hi + r.target_change(0) << "], requested " << r.target_change(0);
    throw Error(ErrorKind::kTargetUnreachable, msg.str());
  }
  solution.root_count = static_cast<int>(roots.size());
  solution.delta_kp = *std::min_element(roots.begin(), roots.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  });
  return solution;
}

PlanSolution LeastSquares(const PlanResidual& r) {
  const std::vector<double> grid = r.Grid();
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = r.Squared(grid[i]);
    if (v < best_value || (v == best_value && std::abs(grid[i]) < std::abs(grid[best]))) {
      best_value = v;
      best = i;
    }
  }
  // golden section on the neighbouring cells
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  PlanSolution solution;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = r.Squared(c), fd = r.Squared(d);
  while (b - a > kPlanTolerance && solution.iterations < kPlanMaxIterations) {
    ++solution.iterations;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = r.Squared(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = r.Squared(d);
    }
  }
  const double mid = 0.5 * (a + b);
  solution.delta_kp = r.Squared(mid) <= best_value ? mid : grid[best];
  solution.root_count = 1;
  return solution;
}

PlanSolution FixedPoint(const PlanResidual& r) {
  const double target = r.target_change(0);
  PlanSolution solution;
  if (target == 0.0) return solution;
  auto slope = [&](double delta) { return (r.Scalar(delta) + target) / delta; };
  double delta = 1e-3 * (r.upper() - r.lower());
  for (int it = 0; it < kPlanMaxIterations; ++it) {
    ++solution.iterations;
    const double s = slope(delta);
    if (!(std::abs(s) > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorKind::kTargetUnreachable, "sensitivity slope vanished");
    }
    const double next = target / s;
    if (std::abs(next - delta) < kPlanTolerance) {
      delta = next;
      break;
    }
    delta = next;
  }
  solution.delta_kp = delta;
  solution.root_count = 1;
  return solution;
}

}  // namespace

PlanSolution SolveKp(const SensitivityModel& model, const PlanningProblem& problem,
                     SolveMode mode) {
  if (problem.t_constraint <= 0 || problem.t_constraint >= model.steps) {
    throw Error(ErrorKind::kConfig, "t_constraint must lie strictly inside (0, T)");
  }
  const PlanResidual r(model, problem);
  PlanSolution solution;
  if (mode == SolveMode::kFixedPoint) {
    if (r.dims() != 1) {
      throw Error(ErrorKind::kConfig, "fixed-point mode needs exactly one constraint joint");
    }
    solution = FixedPoint(r);
  } else if (r.dims() == 1) {
    solution = RootSearch(r);
  } else {
    solution = LeastSquares(r);
  }
  solution.kp_star = problem.source_kp + solution.delta_kp;
  solution.residuals = r(solution.delta_kp);
  return solution;
}

PolicySpec PdPolicyWithGain(const PolicySpec& base, double kp) {
  if (base.family != PolicyFamily::kPdFeedback && base.family != PolicyFamily::kPFeedback) {
    throw Error(ErrorKind::kConfig, "planning needs a feedback policy");
  }
  PolicySpec policy = base;
  policy.theta(0) = kp;
  return policy;
}

PlanReport PlanAndVerify(const SensitivityModel& model, const PlanningProblem& problem,
                         const PlanSimConfig& sim, SolveMode mode) {
  PlanReport report;
  PolicySpec source_policy = PdPolicyWithGain(sim.policy, problem.source_kp);
  if (source_policy.family == PolicyFamily::kPdFeedback) {
    if (source_policy.theta.size() > 1) {
      source_policy.theta(1) = problem.fixed_kd;
    } else {
      source_policy.fixed.kd = problem.fixed_kd;
    }
  }
  report.source = Rollout(source_policy, sim.x0, sim.steps, sim.dt, sim.mode);
  PlanningProblem anchored = problem;
  if (!anchored.source_state && problem.t_constraint > 0 &&
      problem.t_constraint <= report.source.steps()) {
    anchored.source_state = Vector3(report.source.angles.row(problem.t_constraint).transpose());
  }
  report.solution = SolveKp(model, anchored, mode);
  report.planned = Rollout(PdPolicyWithGain(source_policy, report.solution.kp_star), sim.x0,
                           sim.steps, sim.dt, sim.mode);

  std::vector<int> dims = problem.constraint_dims;
  if (dims.empty()) dims = {0, 1, 2};
  const int t = problem.t_constraint;
  report.source_state = report.source.angles.row(t).transpose();
  report.achieved_state = report.planned.angles.row(t).transpose();
  double miss = 0.0, source_miss = 0.0;
  for (int d : dims) {
    miss += std::pow(report.achieved_state(d) - problem.x_target_t(d), 2);
    source_miss += std::pow(report.source_state(d) - problem.x_target_t(d), 2);
  }
  report.miss_distance = std::sqrt(miss);
  report.source_miss_distance = std::sqrt(source_miss);
  report.improvement =
      report.source_miss_distance > 0.0 ? 1.0 - report.miss_distance / report.source_miss_distance
                                        : 0.0;
  report.improved = report.miss_distance < report.source_miss_distance;
  return report;
}

std::vector<PlanningScenario> DefaultScenarios() {
  return {{"short", 0.03}, {"medium", 0.09}, {"long", 0.17}};
}

}  // namespace physderiv
