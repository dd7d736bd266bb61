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

// Scenario configuration: an INI-style key/value file with sections, the
// built-in disturbance functions and the paper-fig1 preset.
//
//   [graph]     nodes, dim, edges = 1-2, 2-3, ..., lengths, shape (optional)
//   [initial]   positions, velocities (optional, default 0)
//   [dynamics]  agentN = <builtin> [key=value ...]   (unlisted agents: zero)
//   [prior]     agentN = <builtin> [key=value ...]   (controller estimate)
//   [control]   gains (one value or one per agent), length_unit
//   [schedule]  dt, duration, sample_period, refit_period, learn_until
//   [gp]        signal_variance (auto|x), lengthscales (auto|list),
//               noise_variance, optimize, capacity (none|N),
//               measurement_noise, acceleration (exact|finite-difference),
//               max_iterations
//   [bounds]    delta, rkhs_norms (auto|list), position_range,
//               velocity_range, grid_points
//   [run]       name, learning (on|off), seed, output
//
// Lines starting with '#' or ';' are comments. Unknown sections and keys
// are rejected.

#ifndef GPFORMATION_SCENARIO_HPP_
#define GPFORMATION_SCENARIO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gpformation/rigidity.hpp"
#include "gpformation/sim.hpp"

namespace gpformation {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DynamicsSpec {
  std::string name = "zero";
  std::map<std::string, double> params;

  bool operator==(const DynamicsSpec&) const = default;
};

// Names: zero, paper-f1, paper-f3, custom-sinusoid (amplitude, frequency),
// custom-gaussian-bump (amplitude, rate, center, offset). Throws ConfigError
// for unknown names or parameters. Components beyond the second are zero.
AgentFunction BuiltinDynamics(const DynamicsSpec& spec, int dim);

struct ScenarioConfig {
  std::string name = "custom";
  FormationGraph graph;
  Eigen::VectorXd shape;  // optional realization of the desired shape
  Eigen::VectorXd initial_p;
  Eigen::VectorXd initial_v;
  std::vector<DynamicsSpec> dynamics;  // one per agent
  std::vector<DynamicsSpec> priors;    // one per agent
  Eigen::VectorXd gains;               // one per agent
  double length_unit = 1.0;
  Schedule schedule;

  std::optional<double> signal_variance;  // empty: from the data
  Eigen::VectorXd lengthscales;           // empty: 50 per input
  double noise_variance = 1e-4;
  bool optimize = true;
  int max_iterations = 400;
  std::optional<std::size_t> capacity;
  double measurement_noise = 0.0;
  AccelerationSource acceleration = AccelerationSource::kExact;

  double delta = 0.9;
  std::vector<double> rkhs_norms;  // empty: surrogate
  double position_lo = 300.0;
  double position_hi = 800.0;
  double velocity_lo = -150.0;
  double velocity_hi = 150.0;
  int grid_points = 5;

  bool learning = true;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  // Checks every field and that the desired shape is infinitesimally and
  // minimally rigid. Throws ConfigError.
  void Validate() const;
};

// Parses and validates. Error messages carry "line N:" prefixes.
ScenarioConfig ParseConfig(std::string_view text);
ScenarioConfig LoadConfig(const std::string& path);

std::vector<std::string> PresetNames();
// Throws ConfigError for unknown names.
std::string PresetText(const std::string& name);
ScenarioConfig LoadPreset(const std::string& name);

// Canonical text form; ParseConfig(SerializeConfig(c)) reproduces c.
std::string SerializeConfig(const ScenarioConfig& config);

// FNV-1a of the canonical text without the output directory.
std::uint64_t ConfigHash(const ScenarioConfig& config);

// Realization used for the rigidity check: `shape` if given, otherwise a
// numerically realized one.
Eigen::VectorXd DesiredShapeRealization(const ScenarioConfig& config);

SimulationSetup ToSimulationSetup(const ScenarioConfig& config);

}  // namespace gpformation

#endif  // GPFORMATION_SCENARIO_HPP_
