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

#include "physderiv/config.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "physderiv/error.h"
#include "physderiv/io.h"

namespace physderiv {

namespace pt = boost::property_tree;

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(Trim(item));
  return out;
}

double ParseAtom(const std::string& s) {
  if (s == "pi") return std::numbers::pi;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kConfig, "not a number: '" + s + "'");
  }
  return v;
}

// products and quotients of numbers and `pi`, e.g. 3*pi/4
double ParseScalar(const std::string& text) {
  const std::string s = Trim(text);
  bool negative = false;
  std::size_t pos = 0;
  if (!s.empty() && s[0] == '-' && s.find("pi") != std::string::npos) {
    negative = true;
    pos = 1;
  }
  double value = 1.0;
  char op = '*';
  std::string atom;
  for (; pos <= s.size(); ++pos) {
    if (pos == s.size() || ((s[pos] == '*' || s[pos] == '/') && !atom.empty())) {
      const double a = ParseAtom(Trim(atom));
      value = op == '*' ? value * a : value / a;
      if (pos < s.size()) op = s[pos];
      atom.clear();
    } else {
      atom.push_back(s[pos]);
    }
  }
  return negative ? -value : value;
}

bool ParseBool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorKind::kConfig, "not a boolean: '" + s + "'");
}

int ParseInt(const std::string& s) {
  const double v = ParseScalar(s);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw Error(ErrorKind::kConfig, "not an integer: '" + s + "'");
  }
  return static_cast<int>(v);
}

std::vector<int> ParseIntList(const std::string& s) {
  std::vector<int> out;
  for (const std::string& item : Split(s, ',')) {
    if (!item.empty()) out.push_back(ParseInt(item));
  }
  return out;
}

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Reads one section, rejecting keys outside `allowed`.
class Section {
 public:
  Section(const pt::ptree& root, const std::string& name, std::set<std::string> allowed,
          bool required = true)
      : name_(name) {
    const auto it = root.find(name);
    if (it == root.not_found()) {
      if (required) throw Error(ErrorKind::kConfig, "missing [" + name + "] block");
      return;
    }
    present_ = true;
    for (const auto& [key, child] : it->second) {
      if (!allowed.count(key)) {
        throw Error(ErrorKind::kConfig, "unknown key " + name + "." + key);
      }
      values_[key] = Trim(child.data());
    }
  }

  template <typename Fn>
  auto Wrap(const std::string& key, Fn fn) const {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(ErrorKind::kConfig, name_ + "." + key + ": " + e.what());
    }
  }

  bool present() const { return present_; }
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  std::string Get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::kConfig, "missing key " + name_ + "." + key);
    return it->second;
  }
  std::string Get(const std::string& key, const std::string& fallback) const {
    return Has(key) ? Get(key) : fallback;
  }
  double Number(const std::string& key, double fallback) const {
    return Has(key) ? Wrap(key, [&] { return ParseScalar(Get(key)); }) : fallback;
  }
  int Int(const std::string& key, int fallback) const {
    return Has(key) ? Wrap(key, [&] { return ParseInt(Get(key)); }) : fallback;
  }
  bool Bool(const std::string& key, bool fallback) const {
    return Has(key) ? Wrap(key, [&] { return ParseBool(Get(key)); }) : fallback;
  }

 private:
  std::string name_;
  bool present_ = false;
  std::map<std::string, std::string> values_;
};

std::vector<ParameterGroup> ParseGroups(const std::string& s) {
  std::vector<ParameterGroup> groups;
  for (const std::string& g : Split(s, ';')) {
    if (!g.empty()) groups.push_back({ParseIntList(g), 1.0});
  }
  return groups;
}

std::vector<std::optional<ParameterRange>> ParseRanges(const std::string& s) {
  std::vector<std::optional<ParameterRange>> ranges;
  for (const std::string& item : Split(s, ',')) {
    if (item == "none" || item == "-") {
      ranges.emplace_back();
      continue;
    }
    const auto parts = Split(item, ':');
    if (parts.size() != 2) throw Error(ErrorKind::kConfig, "range must be low:high, got " + item);
    ranges.push_back(ParameterRange{ParseScalar(parts[0]), ParseScalar(parts[1])});
  }
  return ranges;
}

std::vector<PlanningScenario> ParseScenarios(const std::string& s) {
  const std::vector<PlanningScenario> all = DefaultScenarios();
  std::vector<PlanningScenario> out;
  for (const std::string& name : Split(s, ',')) {
    const auto it = std::find_if(all.begin(), all.end(),
                                 [&](const PlanningScenario& p) { return p.name == name; });
    if (it == all.end()) throw Error(ErrorKind::kConfig, "unknown planning scenario " + name);
    out.push_back(*it);
  }
  return out;
}

}  // namespace

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : Split(text, ',')) {
    if (!item.empty()) out.push_back(ParseScalar(item));
  }
  return out;
}

Vector3 ParseVector3(const std::string& text) {
  const std::vector<double> v = ParseNumberList(text);
  if (v.size() == 1) return Vector3::Constant(v[0]);
  if (v.size() != 3) throw Error(ErrorKind::kConfig, "expected 3 numbers, got '" + text + "'");
  return Vector3(v[0], v[1], v[2]);
}

ExperimentConfig ParseConfig(const std::string& text) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  for (const auto& [name, child] : root) {
    static const std::set<std::string> kSections = {"experiment", "sim",  "policy",
                                                    "perturb",    "preprocess", "gp",
                                                    "eval",       "planning",   "output"};
    if (!kSections.count(name)) throw Error(ErrorKind::kConfig, "unknown block [" + name + "]");
    if (child.empty() && !child.data().empty()) {
      throw Error(ErrorKind::kConfig, "key " + name + " outside any block");
    }
  }

  ExperimentConfig cfg;
  cfg.text = text;

  const Section exp(root, "experiment", {"task", "seed", "workers"});
  cfg.task = exp.Get("task");
  cfg.seed = static_cast<std::uint64_t>(exp.Wrap("seed", [&] { return ParseInt(exp.Get("seed")); }));
  cfg.workers = exp.Int("workers", 1);
  if (cfg.workers < 1) throw Error(ErrorKind::kConfig, "experiment.workers must be >= 1");

  const Section sim(root, "sim",
                    {"mode", "damping", "gravity_gain", "torque_cap", "dt", "steps", "x0",
                     "temporal_shift_max", "spatial_std", "initial_state_std"});
  cfg.sim.mode.tag = sim.Wrap("mode", [&] { return ParseDynamics(sim.Get("mode")); });
  cfg.sim.mode.damping = sim.Number("damping", 1.0);
  cfg.sim.mode.gravity_gain = sim.Number("gravity_gain", 0.5);
  cfg.sim.mode.torque_cap = sim.Number("torque_cap", 10.0);
  cfg.sim.dt = sim.Number("dt", 0.01);
  cfg.sim.steps = sim.Int("steps", 1500);
  if (sim.Has("x0")) cfg.sim.x0.angles = sim.Wrap("x0", [&] { return ParseVector3(sim.Get("x0")); });
  cfg.sim.temporal_shift_max = sim.Int("temporal_shift_max", 0);
  if (sim.Has("spatial_std")) {
    cfg.sim.spatial_std = sim.Wrap("spatial_std", [&] { return ParseVector3(sim.Get("spatial_std")); });
  }
  cfg.sim.initial_state_std = sim.Number("initial_state_std", 0.0);
  if (!(cfg.sim.dt > 0.0) || cfg.sim.steps < 1 || cfg.sim.mode.damping < 0.0 ||
      cfg.sim.temporal_shift_max < 0 || (cfg.sim.spatial_std.array() < 0.0).any() ||
      cfg.sim.initial_state_std < 0.0 || !(cfg.sim.mode.torque_cap > 0.0)) {
    throw Error(ErrorKind::kConfig, "invalid [sim] values");
  }

  const Section pol(root, "policy", {"family", "theta", "target", "joints", "amplitudes", "kd"});
  cfg.policy.family = pol.Wrap("family", [&] { return ParsePolicyFamily(pol.Get("family")); });
  cfg.policy.theta = ToVector(pol.Wrap("theta", [&] { return ParseNumberList(pol.Get("theta")); }));
  if (pol.Has("target")) {
    cfg.policy.fixed.target = pol.Wrap("target", [&] { return ParseVector3(pol.Get("target")); });
  }
  if (pol.Has("joints")) cfg.policy.fixed.joints = ParseIntList(pol.Get("joints"));
  if (pol.Has("amplitudes")) {
    cfg.policy.fixed.amplitudes = ToVector(ParseNumberList(pol.Get("amplitudes")));
  }
  cfg.policy.fixed.kd = pol.Number("kd", 0.0);
  cfg.policy.id = cfg.task;
  ValidatePolicy(cfg.policy);
  const int m = static_cast<int>(cfg.policy.theta.size());

  const Section per(root, "perturb",
                    {"scheme", "groups", "lambdas", "n_per_lambda", "count", "ranges"});
  cfg.perturb.scheme = per.Wrap("scheme", [&] { return ParseScheme(per.Get("scheme")); });
  cfg.perturb.n_per_lambda = per.Int("n_per_lambda", 10);
  cfg.perturb.count = per.Int("count", 0);
  if (cfg.perturb.scheme == PerturbationScheme::kGaussian) {
    cfg.perturb.lambdas = per.Wrap("lambdas", [&] { return ParseNumberList(per.Get("lambdas")); });
    if (per.Has("groups")) {
      cfg.perturb.groups = ParseGroups(per.Get("groups"));
    } else {
      ParameterGroup all;
      for (int j = 0; j < m; ++j) all.indices.push_back(j);
      cfg.perturb.groups.push_back(all);
    }
    if (cfg.perturb.lambdas.empty() || cfg.perturb.n_per_lambda < 1) {
      throw Error(ErrorKind::kConfig, "gaussian perturbation needs lambdas and n_per_lambda");
    }
  } else if (cfg.perturb.scheme == PerturbationScheme::kUniform) {
    cfg.perturb.ranges = per.Wrap("ranges", [&] { return ParseRanges(per.Get("ranges")); });
    if (static_cast<int>(cfg.perturb.ranges.size()) != m) {
      throw Error(ErrorKind::kConfig, "perturb.ranges needs one entry per theta component");
    }
    for (const auto& range : cfg.perturb.ranges) {
      if (range && !(range->low < range->high)) {
        throw Error(ErrorKind::kConfig, "perturb.ranges needs low < high");
      }
    }
    if (cfg.perturb.count < 1) throw Error(ErrorKind::kConfig, "uniform perturbation needs count");
  } else {
    throw Error(ErrorKind::kConfig, "experiments sample gaussian or uniform perturbations");
  }
  if (cfg.perturb.count < 0) throw Error(ErrorKind::kConfig, "perturb.count must be >= 0");

  const Section pre(root, "preprocess",
                    {"align", "method", "max_lag", "landmark_dim", "epsilon", "gammas"}, false);
  cfg.preprocess.align = pre.Bool("align", false);
  if (pre.Has("method")) cfg.preprocess.method = ParseAlignMethod(pre.Get("method"));
  cfg.preprocess.max_lag = pre.Int("max_lag", kDefaultMaxLag);
  cfg.preprocess.landmark_dim = pre.Int("landmark_dim", 0);
  cfg.preprocess.epsilon = pre.Number("epsilon", 0.05);
  if (pre.Has("gammas")) cfg.preprocess.gammas = ParseNumberList(pre.Get("gammas"));
  if (cfg.preprocess.gammas.empty() ||
      std::any_of(cfg.preprocess.gammas.begin(), cfg.preprocess.gammas.end(),
                  [](double g) { return g < 0.0; }) ||
      cfg.preprocess.max_lag < 0 || cfg.preprocess.landmark_dim < 0 ||
      cfg.preprocess.landmark_dim > 2) {
    throw Error(ErrorKind::kConfig, "invalid [preprocess] values");
  }

  const Section gp(root, "gp", {"optimize", "restarts", "max_iterations", "stride", "pin_origin"});
  cfg.fit.gp.optimize = gp.Bool("optimize", true);
  cfg.fit.gp.restarts = gp.Int("restarts", 2);
  cfg.fit.gp.max_iterations = gp.Int("max_iterations", 100);
  cfg.fit.gp.seed = cfg.gp_seed();
  cfg.fit.stride = gp.Int("stride", 10);
  cfg.fit.pin_origin = gp.Bool("pin_origin", true);
  cfg.fit.workers = cfg.workers;
  if (cfg.fit.stride < 1 || cfg.fit.gp.restarts < 0 || cfg.fit.gp.max_iterations < 1) {
    throw Error(ErrorKind::kConfig, "invalid [gp] values");
  }
  if (!cfg.fit.gp.optimize) {
    cfg.fit.gp.fixed.lengthscales = Eigen::VectorXd::Ones(m);
  }

  const Section ev(root, "eval", {"heldout"});
  cfg.eval.heldout = ev.Int("heldout", 30);
  if (cfg.eval.heldout < 1) throw Error(ErrorKind::kConfig, "eval.heldout must be >= 1");

  const Section plan(root, "planning",
                     {"enabled", "t", "target", "dims", "source_kp", "kd", "scenarios"}, false);
  cfg.planning.enabled = plan.present() && plan.Bool("enabled", true);
  if (cfg.planning.enabled) {
    cfg.planning.t = plan.Int("t", cfg.sim.steps / 2);
    if (cfg.planning.t <= 0 || cfg.planning.t >= cfg.sim.steps) {
      throw Error(ErrorKind::kConfig, "planning.t must lie strictly inside (0, steps)");
    }
    if (plan.Has("target")) cfg.planning.target = ParseVector3(plan.Get("target"));
    const std::string dims = plan.Get("dims", "all");
    if (dims != "all") cfg.planning.dims = ParseIntList(dims);
    if (plan.Has("source_kp")) cfg.planning.source_kp = plan.Number("source_kp", 0.0);
    cfg.planning.kd = plan.Number("kd", 0.01);
    cfg.planning.scenarios = ParseScenarios(plan.Get("scenarios", "short,medium,long"));
    if (cfg.policy.family != PolicyFamily::kPdFeedback &&
        cfg.policy.family != PolicyFamily::kPFeedback) {
      throw Error(ErrorKind::kConfig, "planning needs a feedback policy");
    }
  }

  const Section out(root, "output", {"dir"});
  cfg.output_dir = out.Get("dir", "out");
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kConfig, e.what());
  }
  return ParseConfig(text);
}

}  // namespace physderiv
