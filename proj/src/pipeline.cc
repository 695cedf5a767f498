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

#include "physderiv/pipeline.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"
#include "physderiv/error.h"
#include "physderiv/io.h"
#include "physderiv/parallel.h"
#include "physderiv/planner.h"
#include "physderiv/voxel.h"

namespace physderiv {

namespace fs = std::filesystem;
using json = nlohmann::json;

NoiseConfig RolloutNoise(const ExperimentConfig& cfg, int index) {
  NoiseConfig noise;
  noise.seed = cfg.noise_seed() + 104729ULL * static_cast<std::uint64_t>(index);
  noise.spatial_std = cfg.sim.spatial_std;
  noise.initial_state_std = cfg.sim.initial_state_std;
  if (cfg.sim.temporal_shift_max > 0) {
    std::mt19937_64 rng(noise.seed);
    std::uniform_int_distribution<int> shift(-cfg.sim.temporal_shift_max,
                                             cfg.sim.temporal_shift_max);
    noise.temporal_shift = shift(rng);
  }
  const bool clean = noise.temporal_shift == 0 && noise.spatial_std.isZero() &&
                     noise.initial_state_std == 0.0;
  noise.id = clean ? "clean" : "rollout" + std::to_string(index);
  return noise;
}

Trajectory SimulateSource(const ExperimentConfig& cfg) {
  return Rollout(cfg.policy, cfg.sim.x0, cfg.sim.steps, cfg.sim.dt, cfg.sim.mode,
                 RolloutNoise(cfg, 0));
}

Trajectory SimulateClean(const ExperimentConfig& cfg, const Eigen::VectorXd& theta) {
  return Rollout(cfg.policy.WithTheta(theta), cfg.sim.x0, cfg.sim.steps, cfg.sim.dt,
                 cfg.sim.mode);
}

Eigen::MatrixXd DrawPerturbations(const ExperimentConfig& cfg, int count, std::uint64_t seed) {
  PerturbationPlan base;
  base.scheme = cfg.perturb.scheme;
  base.nominal = cfg.policy.theta;
  base.seed = seed;
  if (cfg.perturb.scheme == PerturbationScheme::kUniform) {
    base.ranges = cfg.perturb.ranges;
    base.count = count;
    return SampleUniform(base);
  }
  base.groups = cfg.perturb.groups;
  std::size_t combinations = 1;
  for (std::size_t g = 0; g < base.groups.size(); ++g) combinations *= cfg.perturb.lambdas.size();
  const int per = static_cast<int>((static_cast<std::size_t>(count) + combinations - 1) / combinations);
  const std::vector<PerturbationPlan> plans = LambdaSweepPlans(base, cfg.perturb.lambdas, per);
  std::vector<Eigen::MatrixXd> draws;
  for (const PerturbationPlan& plan : plans) draws.push_back(SampleGaussian(plan));

  Eigen::MatrixXd out(count, cfg.policy.theta.size());
  int row = 0;
  for (int i = 0; i < per && row < count; ++i) {
    for (std::size_t c = 0; c < draws.size() && row < count; ++c) out.row(row++) = draws[c].row(i);
  }
  return out;
}

namespace {

int TrainingCount(const ExperimentConfig& cfg) {
  if (cfg.perturb.count > 0) return cfg.perturb.count;
  int combinations = 1;
  for (std::size_t g = 0; g < cfg.perturb.groups.size(); ++g) {
    combinations *= static_cast<int>(cfg.perturb.lambdas.size());
  }
  return combinations * cfg.perturb.n_per_lambda;
}

}  // namespace

Eigen::MatrixXd DrawTraining(const ExperimentConfig& cfg) {
  return DrawPerturbations(cfg, TrainingCount(cfg), cfg.perturb_seed());
}

Eigen::MatrixXd DrawHeldout(const ExperimentConfig& cfg) {
  return DrawPerturbations(cfg, cfg.eval.heldout, cfg.heldout_seed());
}

std::vector<PerturbedRollout> RolloutPerturbations(const ExperimentConfig& cfg,
                                                   const Eigen::MatrixXd& deltas,
                                                   int first_index) {
  std::vector<PerturbedRollout> out(static_cast<std::size_t>(deltas.rows()));
  ParallelFor(static_cast<int>(deltas.rows()), cfg.workers, [&](int i) {
    const Eigen::VectorXd delta = deltas.row(i).transpose();
    PerturbedRollout& r = out[static_cast<std::size_t>(i)];
    r.delta_theta = delta;
    r.trajectory = Rollout(cfg.policy.WithTheta(cfg.policy.theta + delta), cfg.sim.x0,
                           cfg.sim.steps, cfg.sim.dt, cfg.sim.mode,
                           RolloutNoise(cfg, first_index + i));
  });
  return out;
}

PreprocessConfig PreprocessFor(const ExperimentConfig& cfg, double gamma) {
  PreprocessConfig pre;
  pre.align = cfg.preprocess.align;
  pre.method = cfg.preprocess.method;
  pre.max_lag = cfg.preprocess.max_lag;
  pre.landmark_dim = cfg.preprocess.landmark_dim;
  if (gamma > 0.0) pre.voxel = VoxelGrid::Uniform(gamma);
  return pre;
}

std::string GammaTag(double gamma) { return "g" + FormatNumber(gamma, 6); }

namespace {

// Records stage outcomes and file hashes; rewritten after every stage.
class Manifest {
 public:
  Manifest(const ArtifactLayout& layout, const ExperimentConfig& cfg)
      : layout_(layout), config_hash_(Sha256Hex(cfg.text + "\nseed=" + std::to_string(cfg.seed))) {}

  const std::string& config_hash() const { return config_hash_; }

  std::string StageKey(const std::string& stage) const {
    return Sha256Hex(config_hash_ + "/" + stage);
  }

  void Begin(const std::string& stage) {
    stages_.push_back({{"name", stage}, {"key", StageKey(stage)}, {"status", "running"}});
  }
  void Done(const std::vector<fs::path>& files) {
    stages_.back()["status"] = "complete";
    json list = json::array();
    for (const fs::path& f : files) {
      const std::string rel = fs::relative(f, layout_.root).generic_string();
      files_[rel] = Sha256File(f);
      list.push_back(rel);
    }
    stages_.back()["files"] = list;
    Write();
  }
  void Fail(const std::string& message) {
    stages_.back()["status"] = "failed";
    stages_.back()["error"] = message;
    Write();
  }
  void Set(const std::string& key, json value) { extra_[key] = std::move(value); }

  void Write() const {
    json j;
    j["config_sha256"] = config_hash_;
    j["stages"] = stages_;
    j["files"] = files_;
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    WriteFile(layout_.manifest(), j.dump(2) + "\n");
  }

 private:
  const ArtifactLayout& layout_;
  std::string config_hash_;
  json stages_ = json::array();
  json files_ = json::object();
  json extra_ = json::object();
};

// True when an existing manifest covers this config and its files are intact.
bool UpToDate(const ArtifactLayout& layout, const std::string& config_hash) {
  if (!fs::exists(layout.manifest())) return false;
  json j;
  try {
    j = json::parse(ReadFile(layout.manifest()));
  } catch (const json::exception&) {
    return false;
  }
  if (j.value("config_sha256", "") != config_hash || !j.value("complete", false)) return false;
  for (const auto& [rel, hash] : j["files"].items()) {
    const fs::path p = layout.root / rel;
    if (!fs::exists(p) || Sha256File(p) != hash.get<std::string>()) return false;
  }
  return true;
}

template <typename Fn>
auto RunStage(Manifest& manifest, const std::string& stage, Fn fn) {
  manifest.Begin(stage);
  try {
    return fn();
  } catch (const Error& e) {
    manifest.Fail(e.what());
    throw Error(e.kind(), "stage " + stage + ": " + e.what());
  }
}

std::vector<MetricsRow> ReadMetricsRows(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  std::vector<MetricsRow> rows;
  for (const auto& r : table.rows) {
    MetricsRow m;
    m.task = r[static_cast<std::size_t>(table.Column("task"))];
    m.mse_avg = std::stod(r[static_cast<std::size_t>(table.Column("mse"))]);
    m.score_avg = std::stod(r[static_cast<std::size_t>(table.Column("score"))]);
    m.cos_avg = std::stod(r[static_cast<std::size_t>(table.Column("cos_alpha"))]);
    m.timesteps = std::stoi(r[static_cast<std::size_t>(table.Column("timesteps"))]);
    rows.push_back(m);
  }
  return rows;
}

}  // namespace

namespace {

PolicySpec FeedbackPolicy(const PolicySpec& base, double kp, double kd) {
  PolicySpec policy = PdPolicyWithGain(base, kp);
  if (policy.family == PolicyFamily::kPdFeedback) {
    if (policy.theta.size() > 1) policy.theta(1) = kd;
    else policy.fixed.kd = kd;
  }
  return policy;
}

}  // namespace

std::vector<PlanReport> RunPlanning(const ExperimentConfig& cfg, const SensitivityModel& model,
                                    const ArtifactLayout& layout) {
  PlanSimConfig sim;
  sim.policy = cfg.policy;
  sim.x0 = cfg.sim.x0;
  sim.steps = cfg.sim.steps;
  sim.dt = cfg.sim.dt;
  sim.mode = cfg.sim.mode;

  PlanningProblem base;
  base.source_kp = cfg.planning.source_kp.value_or(cfg.policy.theta(0));
  base.fixed_kd = cfg.planning.kd;
  base.t_constraint = cfg.planning.t;
  base.final_target = cfg.policy.fixed.target;
  base.constraint_dims = cfg.planning.dims;

  std::vector<std::pair<std::string, PlanningProblem>> problems;
  if (cfg.planning.target) {
    PlanningProblem p = base;
    p.x_target_t = *cfg.planning.target;
    problems.emplace_back("target", p);
  } else {
    for (const PlanningScenario& s : cfg.planning.scenarios) {
      PlanningProblem p = base;
      const Trajectory target =
          Rollout(FeedbackPolicy(cfg.policy, base.source_kp + s.kp_offset, base.fixed_kd), sim.x0,
                  sim.steps, sim.dt, sim.mode);
      p.x_target_t = target.angles.row(base.t_constraint).transpose();
      problems.emplace_back(s.name, p);
    }
  }

  std::vector<PlanReport> reports(problems.size());
  ParallelFor(static_cast<int>(problems.size()), cfg.workers, [&](int i) {
    reports[static_cast<std::size_t>(i)] =
        PlanAndVerify(model, problems[static_cast<std::size_t>(i)].second, sim);
  });

  std::ostringstream csv;
  csv << "scenario,t,source_kp,kp_star,roots,target_1,target_2,target_3,achieved_1,achieved_2,"
         "achieved_3,source_miss,miss,improvement\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const PlanReport& r = reports[i];
    const PlanningProblem& p = problems[i].second;
    csv << problems[i].first << ',' << p.t_constraint << ',' << FormatNumber(p.source_kp, 10)
        << ',' << FormatNumber(r.solution.kp_star, 10) << ',' << r.solution.root_count;
    for (int d = 0; d < 3; ++d) csv << ',' << FormatNumber(p.x_target_t(d), 10);
    for (int d = 0; d < 3; ++d) csv << ',' << FormatNumber(r.achieved_state(d), 10);
    csv << ',' << FormatNumber(r.source_miss_distance, 10) << ','
        << FormatNumber(r.miss_distance, 10) << ',' << FormatNumber(r.improvement, 10) << '\n';
    WriteTrajectoryCsv(layout.planned(problems[i].first), r.planned);
  }
  WriteFile(layout.planning(), csv.str());
  return reports;
}

PipelineResult RunPipeline(const ExperimentConfig& cfg, bool force) {
  const ArtifactLayout layout{cfg.output_dir};
  Manifest manifest(layout, cfg);
  PipelineResult result;
  result.gammas = cfg.preprocess.gammas;
  if (!force && UpToDate(layout, manifest.config_hash())) {
    const json j = json::parse(ReadFile(layout.manifest()));
    result.rows = ReadMetricsRows(layout.metrics());
    result.best_gamma = j.value("best_gamma", 0.0);
    result.up_to_date = true;
    return result;
  }
  fs::create_directories(layout.root);
  manifest.Set("task", cfg.task);
  manifest.Set("gammas", cfg.preprocess.gammas);
  manifest.Set("complete", false);
  WriteFile(layout.config(), cfg.text);

  const Trajectory source = RunStage(manifest, "simulate", [&] {
    Trajectory src = SimulateSource(cfg);
    WriteTrajectoryCsv(layout.source(), src);
    WriteTrajectoryCsv(layout.source_clean(), SimulateClean(cfg, cfg.policy.theta));
    manifest.Done({layout.config(), layout.source(), MetaPath(layout.source()),
                   layout.source_clean(), MetaPath(layout.source_clean())});
    return src;
  });

  const auto [train, heldout] = RunStage(manifest, "perturb", [&] {
    Eigen::MatrixXd tr = DrawTraining(cfg), ho = DrawHeldout(cfg);
    WritePerturbationCsv(layout.train_thetas(), cfg.policy.theta, tr);
    WritePerturbationCsv(layout.heldout_thetas(), cfg.policy.theta, ho);
    manifest.Done({layout.train_thetas(), layout.heldout_thetas()});
    return std::pair{tr, ho};
  });

  const auto [train_rollouts, heldout_rollouts] = RunStage(manifest, "rollout", [&] {
    auto tr = RolloutPerturbations(cfg, train, 1);
    auto ho = RolloutPerturbations(cfg, heldout, 1 + static_cast<int>(train.rows()));
    manifest.Done({});
    return std::pair{std::move(tr), std::move(ho)};
  });

  const std::vector<int> timesteps = TrainedTimesteps(cfg.sim.steps, cfg.fit.stride);
  std::vector<SensitivityModel> models;
  for (double gamma : cfg.preprocess.gammas) {
    const std::string tag = GammaTag(gamma);
    const PreprocessConfig pre = PreprocessFor(cfg, gamma);
    const auto [train_set, heldout_set] = RunStage(manifest, "preprocess_" + tag, [&] {
      DerivativeDataset tr = BuildSamples(source, train_rollouts, pre);
      DerivativeDataset ho = BuildSamples(source, heldout_rollouts, pre);
      WriteSamplesCsv(layout.train_samples(tag), tr, timesteps);
      WriteSamplesCsv(layout.heldout_samples(tag), ho, timesteps);
      manifest.Done({layout.train_samples(tag), layout.heldout_samples(tag)});
      return std::pair{std::move(tr), std::move(ho)};
    });

    const Trajectory source_used = pre.voxel ? VoxelizeTrajectory(source, *pre.voxel) : source;
    SensitivityModel model = RunStage(manifest, "fit_" + tag, [&] {
      SensitivityModel m = FitSensitivityModel(train_set, source_used, cfg.policy.theta, cfg.fit);
      SaveModel(layout.model(tag), m);
      WriteModelSummary(layout.model_summary(tag), m);
      manifest.Done({layout.model(tag), layout.model_summary(tag)});
      return m;
    });

    MetricsRow row = RunStage(manifest, "evaluate_" + tag, [&] {
      Evaluation eval = Evaluate(model, heldout_set, cfg.task, cfg.workers);
      WritePerTimestepCsv(layout.per_timestep(tag), eval);
      manifest.Done({layout.per_timestep(tag)});
      return eval.row;
    });
    if (cfg.preprocess.gammas.size() > 1) row.task += " gamma=" + FormatNumber(gamma, 6);
    result.rows.push_back(row);
    models.push_back(std::move(model));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].score_avg > result.rows[best].score_avg) best = i;
  }
  result.best_gamma = cfg.preprocess.gammas[best];
  manifest.Set("best_gamma", result.best_gamma);
  manifest.Set("best_tag", GammaTag(result.best_gamma));

  RunStage(manifest, "metrics", [&] {
    WriteMetricsCsv(layout.metrics(), result.rows);
    manifest.Done({layout.metrics()});
    return 0;
  });

  if (cfg.planning.enabled) {
    RunStage(manifest, "plan", [&] {
      RunPlanning(cfg, models[best], layout);
      std::vector<fs::path> files{layout.planning()};
      const std::vector<std::string> names =
          cfg.planning.target ? std::vector<std::string>{"target"} : [&] {
            std::vector<std::string> n;
            for (const auto& s : cfg.planning.scenarios) n.push_back(s.name);
            return n;
          }();
      for (const std::string& n : names) {
        files.push_back(layout.planned(n));
        files.push_back(MetaPath(layout.planned(n)));
      }
      manifest.Done(files);
      return 0;
    });
  }
  manifest.Set("complete", true);
  manifest.Write();
  return result;
}

std::string_view PlotKindName(PlotKind kind) {
  switch (kind) {
    case PlotKind::kGpEvolution: return "gp_evolution";
    case PlotKind::kCosHistogram: return "cos_histogram";
    case PlotKind::kQuiver: return "quiver";
    case PlotKind::kVoxelOverlap: return "voxel_overlap";
    case PlotKind::kPlanning: return "planning";
  }
  return "unknown";
}

PlotKind ParsePlotKind(std::string_view name) {
  for (PlotKind k : {PlotKind::kGpEvolution, PlotKind::kCosHistogram, PlotKind::kQuiver,
                     PlotKind::kVoxelOverlap, PlotKind::kPlanning}) {
    if (PlotKindName(k) == name) return k;
  }
  throw Error(ErrorKind::kConfig, "unknown plot kind " + std::string(name));
}

namespace {

void Require(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kDependency, "missing artifact " + path.string());
  }
}

json ReadManifest(const ArtifactLayout& layout) {
  Require(layout.manifest());
  return json::parse(ReadFile(layout.manifest()));
}

constexpr int kEvolutionGrid = 41;
constexpr int kQuiverSamples = 10;

std::string EmitGpEvolution(const ArtifactLayout& layout, const std::string& tag) {
  Require(layout.model(tag));
  const SensitivityModel model = LoadModel(layout.model(tag));
  std::ostringstream out;
  out << "t,param,dtheta,dim,mean,lower,upper\n";
  const Eigen::Index m = model.nominal_theta.size();
  for (const TimestepModel& tm : model.models) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double lo = std::min(model.training_delta_theta.col(j).minCoeff(), 0.0);
      const double hi = std::max(model.training_delta_theta.col(j).maxCoeff(), 0.0);
      for (int g = 0; g < kEvolutionGrid; ++g) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
        x(j) = lo + (hi - lo) * g / (kEvolutionGrid - 1);
        const StatePrediction p = Predict(tm, x);
        for (int d = 0; d < kStateDim; ++d) {
          out << tm.t << ',' << j + 1 << ',' << FormatNumber(x(j), 10) << ',' << d + 1 << ','
              << FormatNumber(p.mean(d), 10) << ',' << FormatNumber(p.mean(d) - 2 * p.stddev(d), 10)
              << ',' << FormatNumber(p.mean(d) + 2 * p.stddev(d), 10) << '\n';
        }
      }
    }
  }
  return out.str();
}

std::string EmitCosHistogram(const ArtifactLayout& layout, const std::string& tag) {
  Require(layout.per_timestep(tag));
  const CsvTable table = ReadCsv(layout.per_timestep(tag));
  std::ostringstream out;
  out << "t,bin,low,high,count\n";
  const double width = 2.0 / kCosineBins;
  for (const auto& r : table.rows) {
    for (int b = 0; b < kCosineBins; ++b) {
      out << r[0] << ',' << b << ',' << FormatNumber(-1.0 + b * width, 6) << ','
          << FormatNumber(-1.0 + (b + 1) * width, 6) << ','
          << r[static_cast<std::size_t>(table.Column("bin_" + std::to_string(b)))] << '\n';
    }
  }
  return out.str();
}

std::string EmitQuiver(const ArtifactLayout& layout, const std::string& tag) {
  Require(layout.model(tag));
  Require(layout.train_samples(tag));
  const SensitivityModel model = LoadModel(layout.model(tag));
  const DerivativeDataset samples = ReadSamplesCsv(layout.train_samples(tag));
  std::ostringstream out;
  out << "t,sample,source_1,source_2,source_3,perturbed_1,perturbed_2,perturbed_3,"
         "derivative_1,derivative_2,derivative_3\n";
  const int count = std::min(samples.size(), kQuiverSamples);
  for (const TimestepModel& tm : model.models) {
    if (tm.t > samples.steps()) continue;
    for (int k = 0; k < count; ++k) {
      const DerivativeSample s = samples.sample(k, tm.t);
      const Eigen::Vector3d src = model.source_angles.row(tm.t).transpose();
      const Eigen::Vector3d perturbed = src + s.delta_x;
      const Eigen::VectorXd g = Predict(tm, s.delta_theta).mean;
      out << tm.t << ',' << k;
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(src(d), 10);
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(perturbed(d), 10);
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(g(d), 10);
      out << '\n';
    }
  }
  return out.str();
}

std::string EmitVoxelOverlap(const ArtifactLayout& layout, const json& manifest) {
  Require(layout.source());
  const Trajectory source = ReadTrajectoryCsv(layout.source());
  std::ostringstream out;
  out << "gamma,t,x1,x2,x3,c1,c2,c3\n";
  for (double gamma : manifest.value("gammas", std::vector<double>{})) {
    if (gamma <= 0.0) continue;
    const Trajectory vox = VoxelizeTrajectory(source, VoxelGrid::Uniform(gamma));
    for (int t = 0; t <= source.steps(); ++t) {
      out << FormatNumber(gamma, 6) << ',' << t;
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(source.angles(t, d), 9);
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(vox.angles(t, d), 9);
      out << '\n';
    }
  }
  return out.str();
}

std::string EmitPlanning(const ArtifactLayout& layout) {
  Require(layout.planning());
  Require(layout.source_clean());
  const CsvTable plan = ReadCsv(layout.planning());
  const Trajectory source = ReadTrajectoryCsv(layout.source_clean());
  std::ostringstream out;
  out << "scenario,t,source_1,source_2,source_3,planned_1,planned_2,planned_3,target_t,"
         "target_1,target_2,target_3\n";
  for (const auto& r : plan.rows) {
    const std::string& name = r[0];
    Require(layout.planned(name));
    const Trajectory planned = ReadTrajectoryCsv(layout.planned(name));
    const int rows = std::min(source.steps(), planned.steps());
    for (int t = 0; t <= rows; ++t) {
      out << name << ',' << t;
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(source.angles(t, d), 9);
      for (int d = 0; d < 3; ++d) out << ',' << FormatNumber(planned.angles(t, d), 9);
      out << ',' << r[1];
      for (int d = 0; d < 3; ++d) {
        out << ',' << r[static_cast<std::size_t>(plan.Column("target_" + std::to_string(d + 1)))];
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace

fs::path EmitPlotData(const fs::path& artifact_dir, PlotKind kind) {
  const ArtifactLayout layout{artifact_dir};
  const json manifest = ReadManifest(layout);
  const std::string tag = manifest.value("best_tag", GammaTag(0.0));
  std::string data;
  switch (kind) {
    case PlotKind::kGpEvolution: data = EmitGpEvolution(layout, tag); break;
    case PlotKind::kCosHistogram: data = EmitCosHistogram(layout, tag); break;
    case PlotKind::kQuiver: data = EmitQuiver(layout, tag); break;
    case PlotKind::kVoxelOverlap: data = EmitVoxelOverlap(layout, manifest); break;
    case PlotKind::kPlanning: data = EmitPlanning(layout); break;
  }
  const fs::path path = layout.plot(PlotKindName(kind));
  WriteFile(path, data);
  return path;
}

}  // namespace physderiv
