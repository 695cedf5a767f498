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

#include "physderiv/io.h"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "physderiv/error.h"

namespace physderiv {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    out.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseDouble(const std::string& s, const fs::path& path) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kIo, "bad number '" + s + "' in " + path.string());
  }
  return value;
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream OpenOut(const fs::path& path) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

json VectorJson(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd JsonVector(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json MatrixJson(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(VectorJson(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd JsonMatrix(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Eigen::VectorXd row = JsonVector(j[i]);
    if (row.size() != cols) throw Error(ErrorKind::kIo, "ragged matrix in model file");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

}  // namespace

std::string FormatNumber(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out = OpenOut(path);
  out << contents;
}

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 15]);
  }
  return hex;
}

std::string Sha256File(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

int CsvTable::Column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw Error(ErrorKind::kIo, "missing CSV column " + name);
}

CsvTable ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kIo, "empty CSV " + path.string());
  table.header = SplitLine(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    table.rows.push_back(SplitLine(line));
    if (table.rows.back().size() != table.header.size()) {
      throw Error(ErrorKind::kIo, "row width differs from header in " + path.string());
    }
  }
  return table;
}

fs::path MetaPath(const fs::path& csv_path) {
  fs::path meta = csv_path;
  meta.replace_extension(".meta.json");
  return meta;
}

void WriteTrajectoryCsv(const fs::path& path, const Trajectory& traj) {
  traj.Validate();
  std::ofstream out = OpenOut(path);
  out << "t,x1,x2,x3,v1,v2,v3,u1,u2,u3\n";
  const int steps = traj.steps();
  for (int k = 0; k <= steps; ++k) {
    out << k;
    for (int j = 0; j < 3; ++j) out << ',' << FormatNumber(traj.angles(k, j), 9);
    for (int j = 0; j < 3; ++j) out << ',' << FormatNumber(traj.velocities(k, j), 9);
    for (int j = 0; j < 3; ++j) {
      out << ',';
      if (k < steps) out << FormatNumber(traj.torques(k, j), 9);
    }
    out << '\n';
  }

  json meta;
  meta["policy_id"] = traj.meta.policy_id;
  meta["seed"] = traj.meta.seed;
  meta["dt"] = traj.dt;
  meta["mode"] = traj.meta.mode;
  meta["temporal_shift"] = traj.meta.temporal_shift;
  meta["spatial_std"] = VectorJson(traj.meta.spatial_std);
  meta["noise_id"] = traj.meta.noise_id;
  meta["spatial_deviation"] = traj.meta.spatial_deviation;
  if (traj.meta.voxel_gamma) meta["voxel_gamma"] = *traj.meta.voxel_gamma;
  WriteFile(MetaPath(path), meta.dump(2) + "\n");
}

Trajectory ReadTrajectoryCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const int rows = static_cast<int>(table.rows.size());
  if (rows < 2) throw Error(ErrorKind::kInvalidState, "trajectory needs at least 2 states");
  static const char* kNames[] = {"x1", "x2", "x3", "v1", "v2", "v3", "u1", "u2", "u3"};
  int col[9];
  for (int i = 0; i < 9; ++i) col[i] = table.Column(kNames[i]);
  const int tcol = table.Column("t");

  Trajectory traj;
  traj.angles.resize(rows, 3);
  traj.velocities.resize(rows, 3);
  traj.torques.resize(rows - 1, 3);
  for (int k = 0; k < rows; ++k) {
    const auto& r = table.rows[static_cast<std::size_t>(k)];
    for (int j = 0; j < 3; ++j) {
      traj.angles(k, j) = ParseDouble(r[static_cast<std::size_t>(col[j])], path);
      traj.velocities(k, j) = ParseDouble(r[static_cast<std::size_t>(col[3 + j])], path);
      if (k < rows - 1) traj.torques(k, j) = ParseDouble(r[static_cast<std::size_t>(col[6 + j])], path);
    }
  }
  traj.dt = 0.0;
  const fs::path meta_path = MetaPath(path);
  if (fs::exists(meta_path)) {
    const json meta = json::parse(ReadFile(meta_path));
    traj.dt = meta.value("dt", 0.0);
    traj.meta.policy_id = meta.value("policy_id", "");
    traj.meta.seed = meta.value("seed", std::uint64_t{0});
    traj.meta.mode = meta.value("mode", "linear");
    traj.meta.noise_id = meta.value("noise_id", "clean");
    traj.meta.temporal_shift = meta.value("temporal_shift", 0);
    traj.meta.spatial_deviation = meta.value("spatial_deviation", 0.0);
    if (meta.contains("spatial_std")) traj.meta.spatial_std = JsonVector(meta["spatial_std"]);
    if (meta.contains("voxel_gamma")) traj.meta.voxel_gamma = meta["voxel_gamma"].get<double>();
  }
  if (!(traj.dt > 0.0)) {
    const double t1 = ParseDouble(table.rows[1][static_cast<std::size_t>(tcol)], path);
    const double t0 = ParseDouble(table.rows[0][static_cast<std::size_t>(tcol)], path);
    traj.dt = t1 - t0 > 0.0 ? t1 - t0 : 0.01;
  }
  traj.Validate();
  return traj;
}

void WritePerturbationCsv(const fs::path& path, const Eigen::VectorXd& nominal,
                          const Eigen::MatrixXd& deltas) {
  if (deltas.cols() != nominal.size()) {
    throw Error(ErrorKind::kConfig, "perturbations differ in dimension from theta");
  }
  std::ofstream out = OpenOut(path);
  out << "sample_id";
  for (Eigen::Index j = 0; j < nominal.size(); ++j) out << ",theta_" << j + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < deltas.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < nominal.size(); ++j) {
      out << ',' << FormatNumber(nominal(j) + deltas(i, j), 17);
    }
    out << '\n';
  }
}

Eigen::MatrixXd ReadPerturbationCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const Eigen::Index m = static_cast<Eigen::Index>(table.header.size()) - 1;
  if (m < 1) throw Error(ErrorKind::kIo, "perturbation CSV has no parameters");
  Eigen::MatrixXd thetas(static_cast<Eigen::Index>(table.rows.size()), m);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      thetas(static_cast<Eigen::Index>(i), j) =
          ParseDouble(table.rows[i][static_cast<std::size_t>(j + 1)], path);
    }
  }
  return thetas;
}

void WriteSamplesCsv(const fs::path& path, const DerivativeDataset& dataset,
                     const std::vector<int>& timesteps) {
  std::ofstream out = OpenOut(path);
  const int m = dataset.param_dim();
  out << 't';
  for (int j = 0; j < m; ++j) out << ",dtheta_" << j + 1;
  for (int d = 0; d < kStateDim; ++d) out << ",dx_" << d + 1;
  out << ",dtheta_norm\n";
  for (int k = 0; k < dataset.size(); ++k) {
    for (int t : timesteps) {
      const DerivativeSample s = dataset.sample(k, t);
      out << t;
      for (int j = 0; j < m; ++j) out << ',' << FormatNumber(s.delta_theta(j), 17);
      for (int d = 0; d < kStateDim; ++d) out << ',' << FormatNumber(s.delta_x(d), 17);
      out << ',' << FormatNumber(s.magnitude, 17) << '\n';
    }
  }
}

DerivativeDataset ReadSamplesCsv(const fs::path& path) {
  const CsvTable table = ReadCsv(path);
  const int m = static_cast<int>(table.header.size()) - 2 - kStateDim;
  if (m < 1) throw Error(ErrorKind::kIo, "samples CSV has no parameter columns");
  struct Row {
    int t;
    Eigen::VectorXd dtheta;
    Eigen::Vector3d dx;
  };
  std::vector<Row> rows;
  int max_t = 0;
  for (const auto& r : table.rows) {
    Row row{static_cast<int>(ParseDouble(r[0], path)), Eigen::VectorXd(m), Eigen::Vector3d()};
    if (row.t < 0) throw Error(ErrorKind::kIo, "negative timestep in " + path.string());
    for (int j = 0; j < m; ++j) row.dtheta(j) = ParseDouble(r[static_cast<std::size_t>(1 + j)], path);
    for (int d = 0; d < kStateDim; ++d) {
      row.dx(d) = ParseDouble(r[static_cast<std::size_t>(1 + m + d)], path);
    }
    max_t = std::max(max_t, row.t);
    rows.push_back(std::move(row));
  }

  DerivativeDataset dataset;
  std::vector<Eigen::VectorXd> thetas;
  for (const Row& row : rows) {
    int k = -1;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (thetas[i] == row.dtheta) {
        k = static_cast<int>(i);
        break;
      }
    }
    if (k < 0) {
      k = static_cast<int>(thetas.size());
      thetas.push_back(row.dtheta);
      dataset.delta_x.push_back(StateMatrix::Zero(max_t + 1, 3));
    }
    dataset.delta_x[static_cast<std::size_t>(k)].row(row.t) = row.dx.transpose();
  }
  dataset.delta_theta.resize(static_cast<Eigen::Index>(thetas.size()), m);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    dataset.delta_theta.row(static_cast<Eigen::Index>(i)) = thetas[i].transpose();
  }
  dataset.shifts.assign(thetas.size(), 0);
  return dataset;
}

void SaveModel(const fs::path& path, const SensitivityModel& model) {
  json j;
  j["stride"] = model.stride;
  j["steps"] = model.steps;
  j["nominal_theta"] = VectorJson(model.nominal_theta);
  j["training_delta_theta"] = MatrixJson(model.training_delta_theta);
  j["source_angles"] = MatrixJson(model.source_angles);
  json timesteps = json::array();
  for (const TimestepModel& tm : model.models) {
    json entry;
    entry["t"] = tm.t;
    entry["inputs"] = MatrixJson(tm.outputs.front().inputs());
    json outputs = json::array();
    for (const GaussianProcess<double>& gp : tm.outputs) {
      const auto h = gp.hyperparameters();
      outputs.push_back({{"lengthscales", VectorJson(h.lengthscales)},
                         {"signal_variance", h.signal_variance},
                         {"noise_variance", h.noise_variance},
                         {"targets", VectorJson(gp.targets())}});
    }
    entry["outputs"] = std::move(outputs);
    timesteps.push_back(std::move(entry));
  }
  j["timesteps"] = std::move(timesteps);
  WriteFile(path, j.dump() + "\n");
}

SensitivityModel LoadModel(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::kDependency, "missing model " + path.string());
  SensitivityModel model;
  try {
    const json j = json::parse(ReadFile(path));
    model.stride = j.at("stride").get<int>();
    model.steps = j.at("steps").get<int>();
    model.nominal_theta = JsonVector(j.at("nominal_theta"));
    const Eigen::Index m = model.nominal_theta.size();
    model.training_delta_theta = JsonMatrix(j.at("training_delta_theta"), m);
    model.source_angles = JsonMatrix(j.at("source_angles"), 3);
    for (const json& entry : j.at("timesteps")) {
      TimestepModel tm;
      tm.t = entry.at("t").get<int>();
      const Eigen::MatrixXd inputs = JsonMatrix(entry.at("inputs"), m);
      for (const json& out : entry.at("outputs")) {
        GpHyperparameters<double> h;
        h.lengthscales = JsonVector(out.at("lengthscales"));
        h.signal_variance = out.at("signal_variance").get<double>();
        h.noise_variance = out.at("noise_variance").get<double>();
        GaussianProcess<double> gp;
        gp.FitFixed(inputs, JsonVector(out.at("targets")), h);
        tm.outputs.push_back(std::move(gp));
      }
      model.models.push_back(std::move(tm));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, "malformed model file " + path.string() + ": " + e.what());
  }
  return model;
}

void WriteModelSummary(const fs::path& path, const SensitivityModel& model) {
  std::ofstream out = OpenOut(path);
  for (const TimestepModel& tm : model.models) {
    out << "[t=" << tm.t << "]\n";
    for (std::size_t d = 0; d < tm.outputs.size(); ++d) {
      const auto h = tm.outputs[d].hyperparameters();
      out << "dim " << d + 1 << ": lengthscales=";
      for (Eigen::Index i = 0; i < h.lengthscales.size(); ++i) {
        out << (i ? " " : "") << FormatNumber(h.lengthscales(i), 6);
      }
      out << " signal_var=" << FormatNumber(h.signal_variance, 6)
          << " noise_var=" << FormatNumber(h.noise_variance, 6)
          << " n_train=" << tm.outputs[d].size() << '\n';
    }
  }
}

void WriteMetricsCsv(const fs::path& path, const std::vector<MetricsRow>& rows) {
  std::ofstream out = OpenOut(path);
  out << "task,mse,score,cos_alpha,timesteps\n";
  for (const MetricsRow& r : rows) {
    out << r.task << ',' << FormatNumber(r.mse_avg, 10) << ',' << FormatNumber(r.score_avg, 10)
        << ',' << FormatNumber(r.cos_avg, 10) << ',' << r.timesteps << '\n';
  }
}

void WritePerTimestepCsv(const fs::path& path, const Evaluation& eval) {
  std::ofstream out = OpenOut(path);
  out << "t,mse,score,cos_mean,cos_median,cos_count";
  for (int b = 0; b < kCosineBins; ++b) out << ",bin_" << b;
  out << '\n';
  for (const TimestepMetrics& m : eval.per_timestep) {
    out << m.t << ',' << FormatNumber(m.mse, 10) << ',' << FormatNumber(m.score, 10) << ','
        << FormatNumber(m.cos_mean, 10) << ',' << FormatNumber(m.cos_median, 10) << ','
        << m.cos_count;
    for (int c : m.cos_histogram) out << ',' << c;
    out << '\n';
  }
}

}  // namespace physderiv
