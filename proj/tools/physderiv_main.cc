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

// Command-line front end: one subcommand per pipeline stage plus `run`.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "physderiv/align.h"
#include "physderiv/config.h"
#include "physderiv/error.h"
#include "physderiv/io.h"
#include "physderiv/pipeline.h"
#include "physderiv/planner.h"
#include "physderiv/voxel.h"

namespace fs = std::filesystem;
using namespace physderiv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> workers;
};

ExperimentConfig Load(const Globals& g) {
  if (g.config.empty()) throw Error(ErrorKind::kConfig, "--config is required");
  ExperimentConfig cfg = LoadConfig(g.config);
  if (g.seed) {
    cfg.seed = *g.seed;
    cfg.fit.gp.seed = cfg.gp_seed();
  }
  if (g.workers) {
    if (*g.workers < 1) throw Error(ErrorKind::kConfig, "--workers must be >= 1");
    cfg.workers = cfg.fit.workers = *g.workers;
  }
  if (!g.out.empty()) cfg.output_dir = g.out;
  return cfg;
}

fs::path OutDir(const Globals& g) { return g.out.empty() ? fs::path("out") : fs::path(g.out); }

std::vector<int> ParseDims(const std::string& mask) {
  if (mask == "all") return {};
  if (mask.size() != 3 || mask.find_first_not_of("01") != std::string::npos) {
    throw Error(ErrorKind::kConfig, "--dims takes 'all' or a 3-character 0/1 mask");
  }
  std::vector<int> dims;
  for (int d = 0; d < 3; ++d) {
    if (mask[static_cast<std::size_t>(d)] == '1') dims.push_back(d);
  }
  if (dims.empty()) throw Error(ErrorKind::kConfig, "--dims selects no joint");
  return dims;
}

void PrintMetrics(const std::vector<MetricsRow>& rows) {
  for (const MetricsRow& r : rows) {
    std::cout << r.task << ": mse=" << FormatNumber(r.mse_avg, 6)
              << " score=" << FormatNumber(r.score_avg, 6)
              << " cos_alpha=" << FormatNumber(r.cos_avg, 6) << " timesteps=" << r.timesteps
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical derivatives from rollouts of a simulated 3-joint finger"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "experiment INI file");
  app.add_option("--seed", g.seed, "override experiment.seed");
  app.add_option("--out", g.out, "artifact directory");
  app.add_option("--workers", g.workers, "worker threads");

  auto* simulate = app.add_subcommand("simulate", "roll out the nominal policy");
  std::string sim_theta, sim_output;
  int sim_shift = 0;
  double sim_std = 0.0;
  simulate->add_option("--theta", sim_theta, "comma separated parameter override");
  simulate->add_option("--shift", sim_shift, "temporal shift in steps");
  simulate->add_option("--spatial-std", sim_std, "angle noise std");
  simulate->add_option("--output", sim_output, "trajectory CSV");

  auto* perturb = app.add_subcommand("perturb", "draw training and held-out perturbations");

  auto* align = app.add_subcommand("align", "estimate the delay between two trajectories");
  std::string al_ref, al_other, al_method = "corr", al_output;
  int al_lag = kDefaultMaxLag;
  double al_eps = 0.05;
  align->add_option("--ref", al_ref)->required();
  align->add_option("--other", al_other)->required();
  align->add_option("--max-lag", al_lag);
  align->add_option("--method", al_method)->check(CLI::IsMember({"corr", "zero"}));
  align->add_option("--epsilon", al_eps);
  align->add_option("--output", al_output, "write the re-aligned trajectory");

  auto* voxelize = app.add_subcommand("voxelize", "snap angles to voxel centres");
  std::string vx_input, vx_output, vx_origin = "0,0,0";
  double vx_gamma = 0.01;
  voxelize->add_option("--input", vx_input)->required();
  voxelize->add_option("--output", vx_output)->required();
  voxelize->add_option("--gamma", vx_gamma);
  voxelize->add_option("--origin", vx_origin);

  auto* fit = app.add_subcommand("fit", "fit per-timestep GPs to a samples CSV");
  std::string fit_samples, fit_source, fit_model;
  fit->add_option("--samples", fit_samples)->required();
  fit->add_option("--source", fit_source)->required();
  fit->add_option("--model-out", fit_model);

  auto* evaluate = app.add_subcommand("evaluate", "score a model on held-out samples");
  std::string ev_model, ev_samples, ev_task = "eval", ev_output;
  evaluate->add_option("--model", ev_model)->required();
  evaluate->add_option("--samples", ev_samples)->required();
  evaluate->add_option("--task", ev_task);
  evaluate->add_option("--output", ev_output);

  auto* plan = app.add_subcommand("plan", "solve for K_p through an intermediate state");
  std::string pl_model, pl_target, pl_dims = "all";
  int pl_t = 0;
  std::optional<double> pl_kp;
  double pl_kd = 0.01;
  bool pl_fixed_point = false;
  plan->add_option("--model", pl_model)->required();
  plan->add_option("--t", pl_t)->required();
  plan->add_option("--target", pl_target)->required();
  plan->add_option("--dims", pl_dims, "'all' or a 0/1 mask such as 100");
  plan->add_option("--source-kp", pl_kp);
  plan->add_option("--kd", pl_kd);
  plan->add_flag("--fixed-point", pl_fixed_point, "use the fixed-point iteration");

  auto* emit = app.add_subcommand("emit-plots", "write plot data bundles");
  std::string em_kind = "all";
  emit->add_option("--kind", em_kind)
      ->check(CLI::IsMember({"all", "gp_evolution", "cos_histogram", "quiver", "voxel_overlap",
                             "planning"}));

  auto* run = app.add_subcommand("run", "full pipeline");
  bool run_force = false;
  run->add_flag("--force", run_force, "recompute even when artifacts are up to date");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      ExperimentConfig cfg = Load(g);
      if (!sim_theta.empty()) {
        const std::vector<double> v = ParseNumberList(sim_theta);
        cfg.policy.theta = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        ValidatePolicy(cfg.policy);
      }
      NoiseConfig noise;
      noise.temporal_shift = sim_shift;
      noise.spatial_std = Vector3::Constant(sim_std);
      noise.seed = cfg.noise_seed();
      const Trajectory traj =
          Rollout(cfg.policy, cfg.sim.x0, cfg.sim.steps, cfg.sim.dt, cfg.sim.mode, noise);
      const fs::path path =
          sim_output.empty() ? ArtifactLayout{cfg.output_dir}.source() : fs::path(sim_output);
      WriteTrajectoryCsv(path, traj);
      std::cout << "wrote " << path.string() << '\n';
    } else if (*perturb) {
      const ExperimentConfig cfg = Load(g);
      const ArtifactLayout layout{cfg.output_dir};
      WritePerturbationCsv(layout.train_thetas(), cfg.policy.theta, DrawTraining(cfg));
      WritePerturbationCsv(layout.heldout_thetas(), cfg.policy.theta, DrawHeldout(cfg));
      std::cout << "wrote " << layout.train_thetas().string() << " and "
                << layout.heldout_thetas().string() << '\n';
    } else if (*align) {
      const Trajectory ref = ReadTrajectoryCsv(al_ref);
      const Trajectory other = ReadTrajectoryCsv(al_other);
      const DelayEstimate est = al_method == "zero" ? AlignZeroCrossing(ref, other, 0)
                                                    : EstimateDelay(ref, other, al_lag);
      const NoiseClass cls = ClassifyNoise(ref, other, al_eps, al_lag);
      std::cout << "tau_star: " << est.tau_star << '\n'
                << "method: " << AlignMethodName(est.method) << '\n'
                << "residual_l1: " << FormatNumber(cls.residual_l1, 9) << '\n'
                << "kind: " << NoiseKindName(cls.kind) << '\n';
      if (!al_output.empty()) WriteTrajectoryCsv(al_output, ApplyShift(other, est.tau_star));
    } else if (*voxelize) {
      VoxelGrid grid = VoxelGrid::Uniform(vx_gamma, ParseVector3(vx_origin));
      grid.Validate();
      WriteTrajectoryCsv(vx_output, VoxelizeTrajectory(ReadTrajectoryCsv(vx_input), grid));
      std::cout << "wrote " << vx_output << '\n';
    } else if (*fit) {
      const ExperimentConfig cfg = Load(g);
      const DerivativeDataset samples = ReadSamplesCsv(fit_samples);
      const Trajectory source = ReadTrajectoryCsv(fit_source);
      const SensitivityModel model =
          FitSensitivityModel(samples, source, cfg.policy.theta, cfg.fit);
      const fs::path path = fit_model.empty() ? ArtifactLayout{cfg.output_dir}.model("cli")
                                              : fs::path(fit_model);
      SaveModel(path, model);
      std::cout << "wrote " << path.string() << " (" << model.models.size() << " timesteps)\n";
    } else if (*evaluate) {
      const SensitivityModel model = LoadModel(ev_model);
      const DerivativeDataset truth = ReadSamplesCsv(ev_samples);
      const Evaluation eval = Evaluate(model, truth, ev_task, g.workers.value_or(1));
      const fs::path path = ev_output.empty() ? OutDir(g) / "metrics" / "metrics.csv"
                                              : fs::path(ev_output);
      WriteMetricsCsv(path, {eval.row});
      PrintMetrics({eval.row});
    } else if (*plan) {
      const ExperimentConfig cfg = Load(g);
      const SensitivityModel model = LoadModel(pl_model);
      PlanningProblem problem;
      problem.source_kp = pl_kp.value_or(cfg.policy.theta(0));
      problem.fixed_kd = pl_kd;
      problem.t_constraint = pl_t;
      problem.x_target_t = ParseVector3(pl_target);
      problem.final_target = cfg.policy.fixed.target;
      problem.constraint_dims = ParseDims(pl_dims);
      PlanSimConfig sim{cfg.policy, cfg.sim.x0, cfg.sim.steps, cfg.sim.dt, cfg.sim.mode};
      const PlanReport r = PlanAndVerify(model, problem, sim,
                                         pl_fixed_point ? SolveMode::kFixedPoint
                                                        : SolveMode::kRootSearch);
      const fs::path path = ArtifactLayout{cfg.output_dir}.planned("cli");
      WriteTrajectoryCsv(path, r.planned);
      std::cout << "kp_star: " << FormatNumber(r.solution.kp_star, 10) << '\n'
                << "roots: " << r.solution.root_count << '\n'
                << "achieved_x_t: " << FormatNumber(r.achieved_state(0), 9) << ','
                << FormatNumber(r.achieved_state(1), 9) << ','
                << FormatNumber(r.achieved_state(2), 9) << '\n'
                << "miss_distance: " << FormatNumber(r.miss_distance, 9) << '\n'
                << "source_miss_distance: " << FormatNumber(r.source_miss_distance, 9) << '\n'
                << "improvement: " << FormatNumber(r.improvement, 6) << '\n'
                << "trajectory: " << path.string() << '\n';
      if (!r.improved) return kExitStage;
    } else if (*emit) {
      std::vector<PlotKind> kinds;
      if (em_kind == "all") {
        kinds = {PlotKind::kGpEvolution, PlotKind::kCosHistogram, PlotKind::kQuiver,
                 PlotKind::kVoxelOverlap};
        if (fs::exists(ArtifactLayout{OutDir(g)}.planning())) kinds.push_back(PlotKind::kPlanning);
      } else {
        kinds = {ParsePlotKind(em_kind)};
      }
      for (PlotKind k : kinds) std::cout << "wrote " << EmitPlotData(OutDir(g), k).string() << '\n';
    } else if (*run) {
      const ExperimentConfig cfg = Load(g);
      const PipelineResult result = RunPipeline(cfg, run_force);
      if (result.up_to_date) std::cout << "artifacts up to date\n";
      PrintMetrics(result.rows);
      std::cout << "best gamma: " << FormatNumber(result.best_gamma, 6) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return EXIT_SUCCESS;
}
