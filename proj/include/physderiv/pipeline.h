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

#ifndef PHYSDERIV_PIPELINE_H_
#define PHYSDERIV_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/config.h"
#include "physderiv/sensitivity.h"
#include "physderiv/sim.h"

namespace physderiv {

// Noise of rollout `index` (0 is the source): a uniform random shift in
// [-max, max] plus the configured spatial and start-state noise.
NoiseConfig RolloutNoise(const ExperimentConfig& cfg, int index);

// Noisy source rollout at the nominal theta.
Trajectory SimulateSource(const ExperimentConfig& cfg);
Trajectory SimulateClean(const ExperimentConfig& cfg, const Eigen::VectorXd& theta);

// Training perturbations (count x m). Gaussian sweeps interleave the lambda
// combinations so a truncated count still covers every combination.
Eigen::MatrixXd DrawPerturbations(const ExperimentConfig& cfg, int count, std::uint64_t seed);
Eigen::MatrixXd DrawTraining(const ExperimentConfig& cfg);
Eigen::MatrixXd DrawHeldout(const ExperimentConfig& cfg);

// Rolls out nominal + delta for every row; rollout i uses RolloutNoise(first_index + i).
std::vector<PerturbedRollout> RolloutPerturbations(const ExperimentConfig& cfg,
                                                   const Eigen::MatrixXd& deltas,
                                                   int first_index);

PreprocessConfig PreprocessFor(const ExperimentConfig& cfg, double gamma);

// Fixed file layout below the artifact root.
struct ArtifactLayout {
  std::filesystem::path root;

  std::filesystem::path manifest() const { return root / "manifest.json"; }
  std::filesystem::path config() const { return root / "config.ini"; }
  std::filesystem::path source() const { return root / "trajectories" / "source.csv"; }
  std::filesystem::path source_clean() const { return root / "trajectories" / "source_clean.csv"; }
  std::filesystem::path planned(const std::string& name) const {
    return root / "trajectories" / ("planned_" + name + ".csv");
  }
  std::filesystem::path train_thetas() const { return root / "samples" / "perturbations_train.csv"; }
  std::filesystem::path heldout_thetas() const {
    return root / "samples" / "perturbations_heldout.csv";
  }
  std::filesystem::path train_samples(const std::string& tag) const {
    return root / "samples" / ("train_" + tag + ".csv");
  }
  std::filesystem::path heldout_samples(const std::string& tag) const {
    return root / "samples" / ("heldout_" + tag + ".csv");
  }
  std::filesystem::path model(const std::string& tag) const {
    return root / "models" / ("model_" + tag + ".json");
  }
  std::filesystem::path model_summary(const std::string& tag) const {
    return root / "models" / ("summary_" + tag + ".txt");
  }
  std::filesystem::path metrics() const { return root / "metrics" / "metrics.csv"; }
  std::filesystem::path per_timestep(const std::string& tag) const {
    return root / "metrics" / ("per_timestep_" + tag + ".csv");
  }
  std::filesystem::path planning() const { return root / "metrics" / "planning.csv"; }
  std::filesystem::path plot(std::string_view kind) const {
    return root / "plots" / (std::string(kind) + ".csv");
  }
};

// "g0", "g0.01", ...
std::string GammaTag(double gamma);

struct PipelineResult {
  std::vector<MetricsRow> rows;
  std::vector<double> gammas;
  double best_gamma = 0.0;
  bool up_to_date = false;
};

// simulate -> perturb -> rollout -> (preprocess -> fit -> evaluate) per
// gamma -> plan. Writes every artifact below cfg.output_dir plus a manifest
// with per-stage keys and SHA-256 hashes of all files. When the manifest
// already matches the config and every listed file, nothing is recomputed.
// A failing stage throws with its name after writing a partial manifest.
PipelineResult RunPipeline(const ExperimentConfig& cfg, bool force = false);

// Planning scenarios of the config against a trained model; writes the
// planning CSV and the planned trajectories.
std::vector<PlanReport> RunPlanning(const ExperimentConfig& cfg, const SensitivityModel& model,
                                    const ArtifactLayout& layout);

enum class PlotKind { kGpEvolution, kCosHistogram, kQuiver, kVoxelOverlap, kPlanning };
std::string_view PlotKindName(PlotKind kind);
PlotKind ParsePlotKind(std::string_view name);

// Writes plots/<kind>.csv from existing artifacts; kDependency when an input
// artifact is missing.
std::filesystem::path EmitPlotData(const std::filesystem::path& artifact_dir, PlotKind kind);

}  // namespace physderiv

#endif  // PHYSDERIV_PIPELINE_H_
