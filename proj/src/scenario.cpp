// Copyright 2026 The gpformation Authors
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

#include "gpformation/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "gpformation/metrics.hpp"

namespace gpformation {

// --- Built-in dynamics -------------------------------------------------------

namespace {

double Param(const DynamicsSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

void RequireParams(const DynamicsSpec& spec, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : spec.params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("dynamics '" + spec.name + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw ConfigError("dynamics parameter '" + key + "' must be finite");
    }
  }
}

AgentFunction Sinusoid(double amplitude, double frequency, int dim) {
  return [=](const Eigen::VectorXd& p, const Eigen::VectorXd&) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
    f[0] = amplitude * std::sin(frequency * p[1]);
    f[1] = amplitude * std::cos(frequency * p[0]);
    return f;
  };
}

AgentFunction GaussianBump(double amplitude, double rate, double center, double offset,
                           int dim) {
  return [=](const Eigen::VectorXd& p, const Eigen::VectorXd&) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
    const double dy = p[1] - center;
    f[0] = amplitude * std::exp(-rate * dy * dy);
    f[1] = offset;
    return f;
  };
}

}  // namespace

AgentFunction BuiltinDynamics(const DynamicsSpec& spec, int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dynamics need dim 2 or 3");
  if (spec.name == "zero") {
    RequireParams(spec, {});
    return {};
  }
  if (spec.name == "paper-f1") {
    RequireParams(spec, {});
    return Sinusoid(200.0, 0.05, dim);
  }
  if (spec.name == "paper-f3") {
    RequireParams(spec, {});
    return GaussianBump(50.0, 0.1, 600.0, 100.0, dim);
  }
  if (spec.name == "custom-sinusoid") {
    RequireParams(spec, {"amplitude", "frequency"});
    return Sinusoid(Param(spec, "amplitude", 200.0), Param(spec, "frequency", 0.05), dim);
  }
  if (spec.name == "custom-gaussian-bump") {
    RequireParams(spec, {"amplitude", "rate", "center", "offset"});
    return GaussianBump(Param(spec, "amplitude", 50.0), Param(spec, "rate", 0.1),
                        Param(spec, "center", 600.0), Param(spec, "offset", 100.0), dim);
  }
  throw ConfigError("unknown dynamics '" + spec.name + "'");
}

// --- Text helpers ------------------------------------------------------------

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(Trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Document {
 public:
  void Set(const std::string& section, const std::string& key, Entry entry) {
    auto& keys = sections_[section];
    if (keys.count(key)) {
      throw ConfigError("line " + std::to_string(entry.line) + ": duplicate key '" + key +
                        "' in [" + section + "]");
    }
    keys.emplace(key, std::move(entry));
  }
  const Entry* Find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
  const std::map<std::string, std::map<std::string, Entry>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

[[noreturn]] void Fail(const Entry& entry, const std::string& message) {
  throw ConfigError("line " + std::to_string(entry.line) + ": " + message);
}

double ParseDouble(std::string_view token, const Entry& entry, const std::string& what) {
  token = Trim(token);
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(value)) {
    Fail(entry, what + ": '" + std::string(token) + "' is not a finite number");
  }
  return value;
}

long long ParseInteger(std::string_view token, const Entry& entry, const std::string& what) {
  token = Trim(token);
  long long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    Fail(entry, what + ": '" + std::string(token) + "' is not an integer");
  }
  return value;
}

Eigen::VectorXd ParseList(const Entry& entry, const std::string& what) {
  const auto parts = Split(entry.value, ',');
  Eigen::VectorXd values(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    values[static_cast<Eigen::Index>(i)] = ParseDouble(parts[i], entry, what);
  }
  return values;
}

bool ParseBool(const Entry& entry, const std::string& what) {
  const std::string_view v = Trim(entry.value);
  if (v == "on" || v == "true" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "no") return false;
  Fail(entry, what + " must be on/off");
}

DynamicsSpec ParseDynamics(const Entry& entry) {
  std::istringstream in(entry.value);
  DynamicsSpec spec;
  if (!(in >> spec.name)) Fail(entry, "missing dynamics name");
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      Fail(entry, "dynamics parameter '" + token + "' must be key=value");
    }
    const std::string key = token.substr(0, eq);
    if (spec.params.count(key)) Fail(entry, "duplicate dynamics parameter '" + key + "'");
    spec.params[key] = ParseDouble(std::string_view(token).substr(eq + 1), entry, key);
  }
  return spec;
}

std::string JoinList(const Eigen::VectorXd& values) {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += FormatDouble(values[i]);
  }
  return out;
}

std::string FormatDynamics(const DynamicsSpec& spec) {
  std::string out = spec.name;
  for (const auto& [key, value] : spec.params) out += " " + key + "=" + FormatDouble(value);
  return out;
}

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"name", "learning", "seed", "output"}},
      {"graph", {"nodes", "dim", "edges", "lengths", "shape"}},
      {"initial", {"positions", "velocities"}},
      {"dynamics", {}},
      {"prior", {}},
      {"control", {"gains", "length_unit"}},
      {"schedule", {"dt", "duration", "sample_period", "refit_period", "learn_until"}},
      {"gp",
       {"signal_variance", "lengthscales", "noise_variance", "optimize", "capacity",
        "measurement_noise", "acceleration", "max_iterations"}},
      {"bounds", {"delta", "rkhs_norms", "position_range", "velocity_range", "grid_points"}},
  };
  return keys;
}

Document Tokenize(std::string_view text) {
  Document doc;
  std::string section;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const Entry here{"", line_no};
    if (line.front() == '[') {
      if (line.back() != ']') Fail(here, "malformed section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      if (!KnownKeys().count(section)) Fail(here, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) Fail(here, "expected key = value");
    if (section.empty()) Fail(here, "key outside of a section");
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) Fail(here, "empty key");
    const bool per_agent = section == "dynamics" || section == "prior";
    if (per_agent) {
      if (key.rfind("agent", 0) != 0) {
        Fail(here, "unknown key '" + key + "' in [" + section + "] (expected agentN)");
      }
    } else if (!KnownKeys().at(section).count(key)) {
      Fail(here, "unknown key '" + key + "' in [" + section + "]");
    }
    doc.Set(section, key, Entry{std::string(Trim(line.substr(eq + 1))), line_no});
  }
  return doc;
}

}  // namespace

// --- Parsing -----------------------------------------------------------------

ScenarioConfig ParseConfig(std::string_view text) {
  const Document doc = Tokenize(text);
  ScenarioConfig config;
  auto required = [&](const std::string& section, const std::string& key) -> const Entry& {
    const Entry* entry = doc.Find(section, key);
    if (!entry) throw ConfigError("missing required key '" + key + "' in [" + section + "]");
    return *entry;
  };
  auto number = [&](const std::string& section, const std::string& key, double& out) {
    if (const Entry* e = doc.Find(section, key)) out = ParseDouble(e->value, *e, key);
  };

  // [run]
  if (const Entry* e = doc.Find("run", "name")) config.name = e->value;
  if (const Entry* e = doc.Find("run", "learning")) config.learning = ParseBool(*e, "learning");
  if (const Entry* e = doc.Find("run", "seed")) {
    const long long seed = ParseInteger(e->value, *e, "seed");
    if (seed < 0) Fail(*e, "seed must be nonnegative");
    config.seed = static_cast<std::uint64_t>(seed);
  }
  if (const Entry* e = doc.Find("run", "output")) config.output_dir = e->value;

  // [graph]
  {
    const Entry& nodes = required("graph", "nodes");
    const long long n = ParseInteger(nodes.value, nodes, "nodes");
    if (n < 2 || n > 10000) Fail(nodes, "nodes must be between 2 and 10000");
    config.graph.n = static_cast<int>(n);
    if (const Entry* e = doc.Find("graph", "dim")) {
      const long long dim = ParseInteger(e->value, *e, "dim");
      if (dim != 2 && dim != 3) Fail(*e, "dim must be 2 or 3");
      config.graph.dim = static_cast<int>(dim);
    }
    const Entry& edges = required("graph", "edges");
    for (const auto token : Split(edges.value, ',')) {
      const auto dash = token.find('-');
      if (dash == std::string_view::npos) Fail(edges, "edge '" + std::string(token) + "' must be tail-head");
      const long long tail = ParseInteger(token.substr(0, dash), edges, "edge tail");
      const long long head = ParseInteger(token.substr(dash + 1), edges, "edge head");
      if (tail < 1 || tail > n || head < 1 || head > n) {
        Fail(edges, "edge '" + std::string(token) + "' references a node outside 1.." +
                        std::to_string(n));
      }
      config.graph.edges.push_back({static_cast<int>(tail - 1), static_cast<int>(head - 1)});
    }
    const Entry& lengths = required("graph", "lengths");
    config.graph.desired_lengths = ParseList(lengths, "lengths");
    if (config.graph.desired_lengths.size() != config.graph.edge_count()) {
      Fail(lengths, "expected " + std::to_string(config.graph.edge_count()) +
                        " desired lengths, got " +
                        std::to_string(config.graph.desired_lengths.size()));
    }
    try {
      config.graph.Validate();
    } catch (const std::invalid_argument& err) {
      Fail(edges, err.what());
    }
    if (const Entry* e = doc.Find("graph", "shape")) {
      config.shape = ParseList(*e, "shape");
      if (config.shape.size() != config.graph.dim * n) {
        Fail(*e, "shape needs " + std::to_string(config.graph.dim * n) + " coordinates");
      }
    }
  }
  const int n = config.graph.n;
  const int nd = n * config.graph.dim;

  // [initial]
  {
    const Entry& pos = required("initial", "positions");
    config.initial_p = ParseList(pos, "positions");
    if (config.initial_p.size() != nd) {
      Fail(pos, "positions needs " + std::to_string(nd) + " coordinates");
    }
    config.initial_v = Eigen::VectorXd::Zero(nd);
    if (const Entry* e = doc.Find("initial", "velocities")) {
      config.initial_v = ParseList(*e, "velocities");
      if (config.initial_v.size() != nd) {
        Fail(*e, "velocities needs " + std::to_string(nd) + " coordinates");
      }
    }
  }

  // [dynamics], [prior]
  config.dynamics.assign(static_cast<std::size_t>(n), DynamicsSpec{});
  config.priors.assign(static_cast<std::size_t>(n), DynamicsSpec{});
  for (const std::string section : {"dynamics", "prior"}) {
    const auto it = doc.sections().find(section);
    if (it == doc.sections().end()) continue;
    auto& target = section == "dynamics" ? config.dynamics : config.priors;
    for (const auto& [key, entry] : it->second) {
      const long long agent = ParseInteger(std::string_view(key).substr(5), entry, "agent index");
      if (agent < 1 || agent > n) Fail(entry, "agent index out of range 1.." + std::to_string(n));
      target[static_cast<std::size_t>(agent - 1)] = ParseDynamics(entry);
      try {
        BuiltinDynamics(target[static_cast<std::size_t>(agent - 1)], config.graph.dim);
      } catch (const ConfigError& err) {
        Fail(entry, err.what());
      }
    }
  }

  // [control]
  config.gains = Eigen::VectorXd::Constant(n, 2.0);
  if (const Entry* e = doc.Find("control", "gains")) {
    const Eigen::VectorXd gains = ParseList(*e, "gains");
    if (gains.size() == 1) {
      config.gains = Eigen::VectorXd::Constant(n, gains[0]);
    } else if (gains.size() == n) {
      config.gains = gains;
    } else {
      Fail(*e, "gains needs 1 or " + std::to_string(n) + " values");
    }
  }
  number("control", "length_unit", config.length_unit);

  // [schedule]
  number("schedule", "dt", config.schedule.dt);
  number("schedule", "duration", config.schedule.duration);
  number("schedule", "sample_period", config.schedule.sample_period);
  number("schedule", "refit_period", config.schedule.refit_period);
  number("schedule", "learn_until", config.schedule.learn_until);

  // [gp]
  if (const Entry* e = doc.Find("gp", "signal_variance"); e && Trim(e->value) != "auto") {
    config.signal_variance = ParseDouble(e->value, *e, "signal_variance");
  }
  if (const Entry* e = doc.Find("gp", "lengthscales"); e && Trim(e->value) != "auto") {
    config.lengthscales = ParseList(*e, "lengthscales");
    if (config.lengthscales.size() == 1) {
      config.lengthscales = Eigen::VectorXd::Constant(2 * config.graph.dim, config.lengthscales[0]);
    } else if (config.lengthscales.size() != 2 * config.graph.dim) {
      Fail(*e, "lengthscales needs 1 or " + std::to_string(2 * config.graph.dim) + " values");
    }
  }
  number("gp", "noise_variance", config.noise_variance);
  if (const Entry* e = doc.Find("gp", "optimize")) config.optimize = ParseBool(*e, "optimize");
  if (const Entry* e = doc.Find("gp", "max_iterations")) {
    const long long iters = ParseInteger(e->value, *e, "max_iterations");
    if (iters < 1 || iters > 1000000) Fail(*e, "max_iterations out of range");
    config.max_iterations = static_cast<int>(iters);
  }
  if (const Entry* e = doc.Find("gp", "capacity"); e && Trim(e->value) != "none") {
    const long long cap = ParseInteger(e->value, *e, "capacity");
    if (cap < 1) Fail(*e, "capacity must be positive");
    config.capacity = static_cast<std::size_t>(cap);
  }
  number("gp", "measurement_noise", config.measurement_noise);
  if (const Entry* e = doc.Find("gp", "acceleration")) {
    if (e->value == "exact") {
      config.acceleration = AccelerationSource::kExact;
    } else if (e->value == "finite-difference") {
      config.acceleration = AccelerationSource::kFiniteDifference;
    } else {
      Fail(*e, "acceleration must be exact or finite-difference");
    }
  }

  // [bounds]
  number("bounds", "delta", config.delta);
  if (const Entry* e = doc.Find("bounds", "rkhs_norms"); e && Trim(e->value) != "auto") {
    const Eigen::VectorXd norms = ParseList(*e, "rkhs_norms");
    if (norms.size() != nd) Fail(*e, "rkhs_norms needs " + std::to_string(nd) + " values");
    config.rkhs_norms.assign(norms.data(), norms.data() + norms.size());
  }
  auto range = [&](const std::string& key, double& lo, double& hi) {
    if (const Entry* e = doc.Find("bounds", key)) {
      const Eigen::VectorXd r = ParseList(*e, key);
      if (r.size() != 2 || r[0] > r[1]) Fail(*e, key + " must be 'lo, hi' with lo <= hi");
      lo = r[0];
      hi = r[1];
    }
  };
  range("position_range", config.position_lo, config.position_hi);
  range("velocity_range", config.velocity_lo, config.velocity_hi);
  if (const Entry* e = doc.Find("bounds", "grid_points")) {
    const long long points = ParseInteger(e->value, *e, "grid_points");
    if (points < 1 || points > 64) Fail(*e, "grid_points must be between 1 and 64");
    config.grid_points = static_cast<int>(points);
  }

  config.Validate();
  return config;
}

ScenarioConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseConfig(text.str());
  } catch (const ConfigError& err) {
    throw ConfigError(path + ": " + err.what());
  }
}

// --- Validation --------------------------------------------------------------

Eigen::VectorXd DesiredShapeRealization(const ScenarioConfig& config) {
  if (config.shape.size() > 0) return config.shape;
  return RealizeShape(config.graph, config.seed);
}

void ScenarioConfig::Validate() const {
  try {
    graph.Validate();
    schedule.Validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  const Eigen::Index nd = static_cast<Eigen::Index>(graph.n) * graph.dim;
  if (initial_p.size() != nd || initial_v.size() != nd) {
    throw ConfigError("initial state size does not match the graph");
  }
  if (dynamics.size() != static_cast<std::size_t>(graph.n) ||
      priors.size() != static_cast<std::size_t>(graph.n)) {
    throw ConfigError("expected one dynamics entry per agent");
  }
  if (gains.size() != graph.n || (gains.array() <= 0.0).any()) {
    throw ConfigError("gains must be positive, one per agent");
  }
  if (!(length_unit > 0.0)) throw ConfigError("length_unit must be positive");
  if (signal_variance && !(*signal_variance > 0.0)) {
    throw ConfigError("signal_variance must be positive");
  }
  if (lengthscales.size() > 0 && (lengthscales.array() <= 0.0).any()) {
    throw ConfigError("lengthscales must be positive");
  }
  if (!(noise_variance > 0.0)) throw ConfigError("noise_variance must be positive");
  if (measurement_noise < 0.0) throw ConfigError("measurement_noise must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!rkhs_norms.empty() && rkhs_norms.size() != static_cast<std::size_t>(nd)) {
    throw ConfigError("rkhs_norms needs one value per channel");
  }
  for (const double norm : rkhs_norms) {
    if (!(norm >= 0.0)) throw ConfigError("rkhs_norms must be nonnegative");
  }

  const Eigen::VectorXd shape_p = DesiredShapeRealization(*this);
  if (shape_p.size() == 0) {
    throw ConfigError("could not realize the desired edge lengths");
  }
  if (shape.size() > 0) {
    const double tol = 1e-9 * graph.desired_lengths.maxCoeff();
    if (MaxEdgeLengthError(graph, shape) > tol) {
      throw ConfigError("shape does not realize the desired edge lengths");
    }
  }
  const RigidityReport rigidity = RigidityCheck(Framework{graph, shape_p});
  if (!rigidity.infinitesimally_rigid || !rigidity.minimally_rigid) {
    throw ConfigError("desired shape is not infinitesimally and minimally rigid (rank " +
                      std::to_string(rigidity.rank) + ", need " +
                      std::to_string(RigidRankTarget(graph.n, graph.dim)) + " with " +
                      std::to_string(RigidRankTarget(graph.n, graph.dim)) + " edges)");
  }
}

// --- Presets -----------------------------------------------------------------

std::vector<std::string> PresetNames() { return {"paper-fig1"}; }

std::string PresetText(const std::string& name) {
  if (name == "paper-fig1") {
    return R"(# Four planar agents, unit square target with one diagonal.
[run]
name = paper-fig1
learning = on
seed = 0
output = out

[graph]
nodes = 4
dim = 2
edges = 1-2, 2-3, 3-4, 4-1, 1-3
lengths = 100, 100, 100, 100, 141.4213562373095
shape = 0, 0, 0, 100, 100, 100, 100, 0

[initial]
positions = 450, 450, 510, 610, 590, 590, 650, 550
velocities = 0, 0, 0, 0, 0, 0, 0, 0

[dynamics]
agent1 = paper-f1
agent3 = paper-f3

[control]
gains = 2
length_unit = 100

[schedule]
dt = 0.01
duration = 6
sample_period = 0.2
refit_period = 0.4
learn_until = 2.6

[gp]
signal_variance = auto
lengthscales = auto
noise_variance = 0.0001
optimize = on
capacity = none
measurement_noise = 0
acceleration = exact

[bounds]
delta = 0.9
rkhs_norms = auto
position_range = 300, 800
velocity_range = -150, 150
grid_points = 5
)";
  }
  throw ConfigError("unknown preset '" + name + "'");
}

ScenarioConfig LoadPreset(const std::string& name) { return ParseConfig(PresetText(name)); }

// --- Serialization -----------------------------------------------------------

std::string SerializeConfig(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[run]\n"
      << "name = " << c.name << "\n"
      << "learning = " << (c.learning ? "on" : "off") << "\n"
      << "seed = " << c.seed << "\n"
      << "output = " << c.output_dir << "\n\n";

  out << "[graph]\n"
      << "nodes = " << c.graph.n << "\n"
      << "dim = " << c.graph.dim << "\n"
      << "edges = ";
  for (int k = 0; k < c.graph.edge_count(); ++k) {
    if (k) out << ", ";
    out << c.graph.edges[k].tail + 1 << "-" << c.graph.edges[k].head + 1;
  }
  out << "\nlengths = " << JoinList(c.graph.desired_lengths) << "\n";
  if (c.shape.size() > 0) out << "shape = " << JoinList(c.shape) << "\n";
  out << "\n[initial]\n"
      << "positions = " << JoinList(c.initial_p) << "\n"
      << "velocities = " << JoinList(c.initial_v) << "\n\n";

  for (const auto& [section, specs] : {std::pair{"dynamics", &c.dynamics},
                                       std::pair{"prior", &c.priors}}) {
    out << "[" << section << "]\n";
    for (std::size_t i = 0; i < specs->size(); ++i) {
      if ((*specs)[i].name == "zero" && (*specs)[i].params.empty()) continue;
      out << "agent" << i + 1 << " = " << FormatDynamics((*specs)[i]) << "\n";
    }
    out << "\n";
  }

  out << "[control]\n"
      << "gains = " << JoinList(c.gains) << "\n"
      << "length_unit = " << FormatDouble(c.length_unit) << "\n\n";

  out << "[schedule]\n"
      << "dt = " << FormatDouble(c.schedule.dt) << "\n"
      << "duration = " << FormatDouble(c.schedule.duration) << "\n"
      << "sample_period = " << FormatDouble(c.schedule.sample_period) << "\n"
      << "refit_period = " << FormatDouble(c.schedule.refit_period) << "\n"
      << "learn_until = " << FormatDouble(c.schedule.learn_until) << "\n\n";

  out << "[gp]\n"
      << "signal_variance = "
      << (c.signal_variance ? FormatDouble(*c.signal_variance) : std::string("auto")) << "\n"
      << "lengthscales = "
      << (c.lengthscales.size() ? JoinList(c.lengthscales) : std::string("auto")) << "\n"
      << "noise_variance = " << FormatDouble(c.noise_variance) << "\n"
      << "optimize = " << (c.optimize ? "on" : "off") << "\n"
      << "max_iterations = " << c.max_iterations << "\n"
      << "capacity = " << (c.capacity ? std::to_string(*c.capacity) : std::string("none"))
      << "\n"
      << "measurement_noise = " << FormatDouble(c.measurement_noise) << "\n"
      << "acceleration = "
      << (c.acceleration == AccelerationSource::kExact ? "exact" : "finite-difference")
      << "\n\n";

  out << "[bounds]\n"
      << "delta = " << FormatDouble(c.delta) << "\n"
      << "rkhs_norms = ";
  if (c.rkhs_norms.empty()) {
    out << "auto";
  } else {
    out << JoinList(Eigen::Map<const Eigen::VectorXd>(
        c.rkhs_norms.data(), static_cast<Eigen::Index>(c.rkhs_norms.size())));
  }
  out << "\n"
      << "position_range = " << FormatDouble(c.position_lo) << ", "
      << FormatDouble(c.position_hi) << "\n"
      << "velocity_range = " << FormatDouble(c.velocity_lo) << ", "
      << FormatDouble(c.velocity_hi) << "\n"
      << "grid_points = " << c.grid_points << "\n";
  return out.str();
}

std::uint64_t ConfigHash(const ScenarioConfig& config) {
  ScenarioConfig copy = config;
  copy.output_dir.clear();
  const std::string text = SerializeConfig(copy);
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

// --- Setup -------------------------------------------------------------------

SimulationSetup ToSimulationSetup(const ScenarioConfig& config) {
  config.Validate();
  SimulationSetup setup;
  setup.graph = config.graph;
  setup.initial = {config.initial_p, config.initial_v, 0.0};
  for (int i = 0; i < config.graph.n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    setup.dynamics.push_back({BuiltinDynamics(config.dynamics[idx], config.graph.dim),
                              BuiltinDynamics(config.priors[idx], config.graph.dim)});
  }
  setup.gains = {config.gains, config.length_unit};
  setup.schedule = config.schedule;
  setup.gp.init = {config.signal_variance, config.lengthscales, config.noise_variance};
  setup.gp.optimize = config.optimize;
  setup.gp.optimizer.max_iterations = config.max_iterations;
  setup.gp.capacity = config.capacity;
  setup.gp.measurement_noise_std = config.measurement_noise;
  setup.gp.acceleration = config.acceleration;
  setup.bounds.delta = config.delta;
  setup.bounds.rkhs_norms = config.rkhs_norms;
  setup.bounds.omega_grid =
      BoxGrid(config.graph.n, config.graph.dim, config.position_lo, config.position_hi,
              config.velocity_lo, config.velocity_hi, config.grid_points);
  setup.learning = config.learning;
  setup.seed = config.seed;
  setup.config_hash = ConfigHash(config);
  return setup;
}

}  // namespace gpformation
