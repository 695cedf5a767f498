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

#ifndef PHYSDERIV_CONFIG_H_
#define PHYSDERIV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/align.h"
#include "physderiv/perturb.h"
#include "physderiv/planner.h"
#include "physderiv/sensitivity.h"
#include "physderiv/sim.h"

namespace physderiv {

struct SimConfig {
  DynamicsMode mode;
  double dt = 0.01;
  int steps = 1500;
  JointState x0 = StartState();
  // each rollout gets a shift drawn uniformly from [-max, max]
  int temporal_shift_max = 0;
  Vector3 spatial_std = Vector3::Zero();
  double initial_state_std = 0.0;
};

struct PerturbConfig {
  PerturbationScheme scheme = PerturbationScheme::kGaussian;
  std::vector<ParameterGroup> groups;
  // gaussian sweep values, crossed over the groups
  std::vector<double> lambdas;
  int n_per_lambda = 10;
  // total training count; 0 means lambda combinations x n_per_lambda
  int count = 0;
  std::vector<std::optional<ParameterRange>> ranges;
};

struct PreprocessSweep {
  bool align = false;
  AlignMethod method = AlignMethod::kCorrelation;
  int max_lag = kDefaultMaxLag;
  int landmark_dim = 0;
  double epsilon = 0.05;
  // 0 disables voxelization
  std::vector<double> gammas{0.0};
};

struct EvalConfig {
  int heldout = 30;
};

struct PlanningConfig {
  bool enabled = false;
  int t = 0;
  // explicit target; scenarios are used when unset
  std::optional<Vector3> target;
  std::vector<int> dims;
  std::optional<double> source_kp;
  double kd = 0.01;
  std::vector<PlanningScenario> scenarios;
};

// One experiment, read from an INI file with sections
// [experiment] [sim] [policy] [perturb] [preprocess] [gp] [eval] [planning]
// [output]. Block seeds derive from experiment.seed.
struct ExperimentConfig {
  std::string task;
  std::uint64_t seed = 0;
  int workers = 1;
  SimConfig sim;
  PolicySpec policy;
  PerturbConfig perturb;
  PreprocessSweep preprocess;
  FitConfig fit;
  EvalConfig eval;
  PlanningConfig planning;
  std::filesystem::path output_dir = "out";
  // source text, stored with the artifacts
  std::string text;

  std::uint64_t perturb_seed() const { return seed; }
  std::uint64_t heldout_seed() const { return seed + 1000003; }
  std::uint64_t noise_seed() const { return seed + 2000003; }
  std::uint64_t gp_seed() const { return seed + 3000017; }
};

// Throws kConfig on any missing block, unknown key or invalid value.
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// comma separated numbers
std::vector<double> ParseNumberList(const std::string& text);
Vector3 ParseVector3(const std::string& text);

}  // namespace physderiv

#endif  // PHYSDERIV_CONFIG_H_
