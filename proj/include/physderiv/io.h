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

#ifndef PHYSDERIV_IO_H_
#define PHYSDERIV_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "physderiv/sensitivity.h"
#include "physderiv/sim.h"

namespace physderiv {

// Trajectory CSV: `t,x1,x2,x3,v1,v2,v3,u1,u2,u3`, 9 significant digits. The
// final state has no torque and leaves the u columns empty. Metadata goes to
// a JSON sidecar next to the CSV (see MetaPath).
void WriteTrajectoryCsv(const std::filesystem::path& path, const Trajectory& traj);
// Reads the CSV and, when present, its sidecar. dt comes from the sidecar or
// from the t column.
Trajectory ReadTrajectoryCsv(const std::filesystem::path& path);
std::filesystem::path MetaPath(const std::filesystem::path& csv_path);

// `sample_id,theta_1..theta_m` with absolute parameters nominal + delta.
void WritePerturbationCsv(const std::filesystem::path& path, const Eigen::VectorXd& nominal,
                          const Eigen::MatrixXd& deltas);
// Returns the absolute parameter rows.
Eigen::MatrixXd ReadPerturbationCsv(const std::filesystem::path& path);

// `t,dtheta_1..dtheta_m,dx_1..dx_3,dtheta_norm`, one row per sample and
// listed timestep, sample-major, full double precision.
void WriteSamplesCsv(const std::filesystem::path& path, const DerivativeDataset& dataset,
                     const std::vector<int>& timesteps);
// Rows sharing a delta theta form one sample. Unlisted timesteps read as
// zero state change.
DerivativeDataset ReadSamplesCsv(const std::filesystem::path& path);

// Hyperparameters and training data of every timestep map; loading refits
// the factorizations at the stored hyperparameters.
void SaveModel(const std::filesystem::path& path, const SensitivityModel& model);
SensitivityModel LoadModel(const std::filesystem::path& path);

// Text block per timestep: lengthscales, signal_var, noise_var, n_train.
void WriteModelSummary(const std::filesystem::path& path, const SensitivityModel& model);

// `task,mse,score,cos_alpha,timesteps` with one row per evaluation.
void WriteMetricsCsv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
// `t,mse,score,cos_mean,cos_median,cos_count,bin_0..bin_19`.
void WritePerTimestepCsv(const std::filesystem::path& path, const Evaluation& eval);

// Minimal CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int Column(const std::string& name) const;
};
CsvTable ReadCsv(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& contents);
// lowercase hex SHA-256
std::string Sha256Hex(const std::string& data);
std::string Sha256File(const std::filesystem::path& path);

// "%.*g" with the given significant digits
std::string FormatNumber(double value, int digits);

}  // namespace physderiv

#endif  // PHYSDERIV_IO_H_
