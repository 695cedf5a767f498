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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "oracles.h"
#include "physderiv/config.h"
#include "physderiv/error.h"
#include "physderiv/io.h"
#include "physderiv/perturb.h"
#include "physderiv/pipeline.h"
#include "physderiv/sensitivity.h"
#include "physderiv/voxel.h"

namespace fs = std::filesystem;
using namespace physderiv;

namespace {

constexpr double kPi = std::numbers::pi;
const fs::path kConfigDir = PHYSDERIV_CONFIG_DIR;
const fs::path kCli = PHYSDERIV_CLI_PATH;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  // 0 means no runtime bound
  double budget_seconds;
  std::function<Outcome()> run;
};

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("physderiv_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string Fmt(double v, int digits = 4) { return FormatNumber(v, digits); }

bool InsideLimits(const Trajectory& traj) {
  for (Eigen::Index t = 0; t < traj.angles.rows(); ++t) {
    const Vector3 x = traj.angles.row(t).transpose();
    if (((x - kJointLower).array() <= 0.0).any() || ((kJointUpper - x).array() <= 0.0).any()) {
      return false;
    }
  }
  return true;
}

// Linear open-loop nominals in linear mode against the closed-form Jacobian.
Outcome LinearJacobian() {
  const ExperimentConfig cfg = LoadConfig(kConfigDir / "linear_n.ini");
  DynamicsMode mode;
  mode.tag = Dynamics::kLinear;
  mode.damping = 5.0;
  const int steps = cfg.sim.steps;
  const double dt = cfg.sim.dt;
  auto run = [&](const Eigen::VectorXd& theta) {
    return Rollout(cfg.policy.WithTheta(theta), cfg.sim.x0, steps, dt, mode);
  };

  PerturbationPlan plan;
  plan.scheme = PerturbationScheme::kGaussian;
  plan.nominal = cfg.policy.theta;
  plan.groups = cfg.perturb.groups;
  for (ParameterGroup& g : plan.groups) g.lambda_rate = 100.0;
  plan.count = 50;
  plan.seed = cfg.perturb_seed();
  const Eigen::MatrixXd deltas = SamplePlan(plan);

  const Trajectory source = run(plan.nominal);
  std::vector<PerturbedRollout> perturbed;
  bool inside = InsideLimits(source);
  for (Eigen::Index i = 0; i < deltas.rows(); ++i) {
    perturbed.push_back({deltas.row(i).transpose(), run(plan.nominal + deltas.row(i).transpose())});
    inside = inside && InsideLimits(perturbed.back().trajectory);
  }
  const DerivativeDataset data = BuildSamples(source, perturbed);

  double worst = 0.0;
  bool zero_at_start = true;
  for (int t = 0; t <= steps; t += 100) {
    const Eigen::Matrix<double, 3, 6> jac = oracle::LinearOpenLoopJacobian(t, dt, mode.damping);
    for (int k = 0; k < data.size(); ++k) {
      const DerivativeSample s = data.sample(k, t);
      const Eigen::Vector3d expected = jac * s.delta_theta;
      if (t == 0) {
        zero_at_start = zero_at_start && s.delta_x.isZero(0.0) && expected.isZero(0.0);
        continue;
      }
      const Eigen::Vector3d got = DirectionalDerivative(s) * s.magnitude;
      worst = std::max(worst, (got - expected).norm() / expected.norm());
    }
  }
  return {inside && zero_at_start && worst <= 1e-5,
          "max relative error " + Fmt(worst, 3) + " over " + std::to_string(data.size()) +
              " directions, " + std::to_string(steps / 100 + 1) + " timesteps" +
              (inside ? "" : ", a rollout touched a joint limit")};
}

// Linear reconstruction error under halving of the perturbation size.
Outcome ReconstructionOrder() {
  const ExperimentConfig cfg = LoadConfig(kConfigDir / "pd_n.ini");
  const int steps = cfg.sim.steps;
  auto run = [&](const Eigen::VectorXd& theta) {
    return Rollout(cfg.policy.WithTheta(theta), cfg.sim.x0, steps, cfg.sim.dt, cfg.sim.mode);
  };
  const Eigen::VectorXd theta = cfg.policy.theta;
  const int m = static_cast<int>(theta.size());
  const DirectionBasis basis = RandomOrthonormalBasis(m, 1e-5 * theta.norm(), cfg.seed + 17);
  const JacobianStack stack = BuildJacobianStack(run, theta, basis);
  const Trajectory nominal = run(theta);

  auto error = [&](const Eigen::VectorXd& delta) {
    const Trajectory moved = run(theta + delta);
    double worst = 0.0;
    for (int t = 0; t <= steps; ++t) {
      const Eigen::Vector3d truth = (moved.angles.row(t) - nominal.angles.row(t)).transpose();
      worst = std::max(worst, (ReconstructLinear(stack, basis, delta, t) - truth).norm());
    }
    return worst;
  };

  std::mt19937_64 rng(cfg.seed + 29);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double size = 0.1 * theta.norm();
  std::vector<double> ratios;
  double full_sum = 0.0, half_sum = 0.0;
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd dir(m);
    for (int i = 0; i < m; ++i) dir(i) = normal(rng);
    dir.normalize();
    const double full = error(size * dir), half = error(0.5 * size * dir);
    full_sum += full;
    half_sum += half;
    ratios.push_back(full / half);
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const int meeting = static_cast<int>(
      std::count_if(ratios.begin(), ratios.end(), [](double r) { return r >= 4.0; }));
  return {meeting == 50, std::to_string(meeting) + "/50 directions shrink >= 4x; ratio min " +
                             Fmt(sorted.front()) + " median " + Fmt(sorted[25]) + " max " +
                             Fmt(sorted.back()) + " pooled " + Fmt(full_sum / half_sum)};
}

// Desk-scale PD(U) experiment through the full pipeline.
Outcome Generalization() {
  ExperimentConfig cfg = LoadConfig(kConfigDir / "pd_u_desk.ini");
  cfg.output_dir = ScratchDir("pd_u_desk");
  const PipelineResult result = RunPipeline(cfg, true);
  const auto best = std::find_if(result.rows.begin(), result.rows.end(), [&](const MetricsRow& r) {
    return r.task.find("gamma=" + FormatNumber(result.best_gamma, 6)) != std::string::npos;
  });
  if (best == result.rows.end()) return {false, "best gamma row missing"};
  std::ostringstream rows;
  for (const MetricsRow& r : result.rows) {
    rows << "; " << r.task << " score " << Fmt(r.score_avg) << " cos " << Fmt(r.cos_avg);
  }
  return {best->score_avg >= 0.8 && best->cos_avg >= 0.9,
          "best gamma " + Fmt(result.best_gamma) + ": score " + Fmt(best->score_avg) + " cos " +
              Fmt(best->cos_avg) + rows.str()};
}

// Exact lag recovery over the full window on five trajectories.
Outcome DelayRecovery() {
  DynamicsMode pendulum;
  pendulum.tag = Dynamics::kPendulum3;
  const Vector3 target(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);
  std::vector<PolicySpec> policies;
  for (double kp : {0.4, 1.0}) {
    PolicySpec pd;
    pd.family = PolicyFamily::kPdFeedback;
    pd.theta = Eigen::Vector2d(kp, 0.01);
    pd.fixed.target = target;
    policies.push_back(pd);
  }
  PolicySpec sine1;
  sine1.family = PolicyFamily::kSinusoidal;
  sine1.theta = Eigen::Vector2d(0.5, 0.01);
  sine1.fixed.joints = {0};
  policies.push_back(sine1);
  PolicySpec sine2;
  sine2.family = PolicyFamily::kSinusoidal;
  sine2.theta = Eigen::Vector4d(-0.4, 0.5, 0.01, 0.01);
  sine2.fixed.joints = {0, 1};
  policies.push_back(sine2);
  PolicySpec linear;
  linear.family = PolicyFamily::kLinearOpenLoop;
  linear.theta.resize(6);
  linear.theta << 0.00001, 0.0001, -0.00001, -0.28, -0.15, -0.08;
  policies.push_back(linear);

  int failures = 0, trials = 0;
  for (const PolicySpec& p : policies) {
    const Trajectory ref = Rollout(p, StartState(), 1500, 0.01, pendulum);
    for (int n = -50; n <= 50; ++n) {
      ++trials;
      if (EstimateDelay(ref, InjectTemporalNoise(ref, n), 50).tau_star != -n) ++failures;
    }
  }
  return {failures == 0 && trials == 505,
          std::to_string(failures) + " failures over " + std::to_string(trials) + " shifts"};
}

// Voxelized difference error against 2 gamma plus the raw noise error.
Outcome VoxelBound() {
  PolicySpec pd;
  pd.family = PolicyFamily::kPdFeedback;
  pd.theta = Eigen::Vector2d(1.0, 0.01);
  pd.fixed.target = Vector3(kPi / 10, 3 * kPi / 4, 7 * kPi / 12);
  DynamicsMode mode;
  mode.tag = Dynamics::kPendulum3;
  const Trajectory source = Rollout(pd, StartState(), 1500, 0.01, mode);
  std::vector<Trajectory> perturbed;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> gain(-0.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    perturbed.push_back(Rollout(pd.WithTheta(Eigen::Vector2d(gain(rng), 0.01)), StartState(), 1500,
                                0.01, mode));
  }

  bool pass = true;
  std::ostringstream detail;
  std::uniform_int_distribution<int> pick(0, 19), step(0, 1500);
  std::normal_distribution<double> noise(0.0, 0.001);
  for (double gamma : {0.01, 0.04, 0.16, 0.2}) {
    const VoxelGrid grid = VoxelGrid::Uniform(gamma);
    std::vector<LemmaSample> samples;
    for (int i = 0; i < 1000; ++i) {
      const int t = step(rng);
      const Vector3 x1 = source.angles.row(t).transpose();
      const Vector3 x2 = perturbed[static_cast<std::size_t>(pick(rng))].angles.row(t).transpose();
      const Vector3 e1(noise(rng), noise(rng), noise(rng)), e2(noise(rng), noise(rng), noise(rng));
      LemmaSample s;
      s.clean_difference = x2 - x1;
      s.voxel_difference = VoxelCenter(Vector3(x2 + e2), grid) - VoxelCenter(Vector3(x1 + e1), grid);
      s.raw_error = (e2 - e1).cwiseAbs().maxCoeff();
      samples.push_back(s);
    }
    const LemmaReport r = CheckLemmaBound(samples, gamma);
    pass = pass && r.holds && r.samplewise_violations == 0;
    detail << (gamma == 0.01 ? "" : "; ") << "gamma " << gamma << ": mean " << Fmt(r.mean_voxel_error)
           << " <= " << Fmt(r.bound) << ", max " << Fmt(r.max_voxel_error) << ", "
           << r.samplewise_violations << " violations";
  }
  return {pass, detail.str()};
}

// Planning scenarios in both dynamics modes through the pipeline.
Outcome Planning() {
  bool pass = true;
  std::ostringstream detail;
  for (Dynamics tag : {Dynamics::kLinear, Dynamics::kPendulum3}) {
    ExperimentConfig cfg = LoadConfig(kConfigDir / "planning.ini");
    cfg.sim.mode.tag = tag;
    cfg.planning.scenarios = DefaultScenarios();
    cfg.output_dir = ScratchDir("planning_" + std::string(DynamicsName(tag)));
    RunPipeline(cfg, true);
    const CsvTable table = ReadCsv(ArtifactLayout{cfg.output_dir}.planning());
    const double needed = tag == Dynamics::kLinear ? 0.8 : 0.5;
    const int name_col = table.Column("scenario"), gain_col = table.Column("improvement");
    if (table.rows.size() != 3) pass = false;
    for (const std::vector<std::string>& row : table.rows) {
      const double g = std::stod(row[static_cast<std::size_t>(gain_col)]);
      pass = pass && g >= needed;
      detail << (detail.tellp() > 0 ? "; " : "") << DynamicsName(tag) << ' '
             << row[static_cast<std::size_t>(name_col)] << ' ' << Fmt(100.0 * g, 3) << '%';
    }
  }
  return {pass, detail.str()};
}

Outcome ScoreChecks() {
  const std::vector<double> y = {0.5, -1.25, 3.0, 2.0};
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  const std::vector<double> flat(y.size(), mean);
  const std::vector<double> a = {1, 2, 3}, b = {1, 2, 4};
  const double perfect = GpScore(y, y), zero = GpScore(y, flat), worked = GpScore(a, b);
  return {perfect == 1.0 && zero == 0.0 && worked == 0.5,
          "score(y,y)=" + Fmt(perfect, 17) + " score(y,mean)=" + Fmt(zero, 17) +
              " score((1,2,3),(1,2,4))=" + Fmt(worked, 17)};
}

int RunCli(const std::vector<std::string>& args) {
  std::string cmd = "\"" + kCli.string() + "\"";
  for (const std::string& a : args) cmd += " \"" + a + "\"";
  cmd += " > /dev/null";
  const int status = std::system(cmd.c_str());
  return status == -1 ? -1 : WEXITSTATUS(status);
}

// Two `run` invocations into fresh directories with the same config.
Outcome Determinism() {
  const fs::path root = ScratchDir("determinism");
  const fs::path config = kConfigDir / "pd_u_desk.ini";
  std::vector<std::string> metrics;
  for (const char* name : {"first", "second"}) {
    const int code = RunCli({"--config", config.string(), "--out", (root / name).string(), "run"});
    if (code != 0) return {false, std::string("run exited with ") + std::to_string(code)};
    metrics.push_back(ReadFile(ArtifactLayout{root / name}.metrics()));
  }
  const bool same = metrics[0] == metrics[1] && !metrics[0].empty();
  return {same, same ? "metrics.csv identical (" + Sha256Hex(metrics[0]).substr(0, 16) + ")"
                     : "metrics.csv differs"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "linear-mode Jacobian matches closed form", 10.0, LinearJacobian},
      {2, "reconstruction error shrinks >= 4x when halved", 60.0, ReconstructionOrder},
      {3, "PD(U) held-out score >= 0.8 and cos >= 0.9", 600.0, Generalization},
      {4, "exact delay recovery over [-50, 50]", 30.0, DelayRecovery},
      {5, "voxelized error <= 2 gamma + raw error", 30.0, VoxelBound},
      {6, "planning improves miss distance", 300.0, Planning},
      {7, "GP score unit values", 1.0, ScoreChecks},
      {8, "run is byte-identical across invocations", 0.0, Determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool all = true;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds == 0.0 || seconds < c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    all = all && pass;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << " - " << c.name
              << " (" << outcome.detail << "; " << Fmt(seconds, 3) << " s";
    if (c.budget_seconds > 0.0) std::cout << " of " << Fmt(c.budget_seconds, 4) << " s";
    std::cout << (in_time ? "" : ", over budget") << ")"
              << std::endl;
  }
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
