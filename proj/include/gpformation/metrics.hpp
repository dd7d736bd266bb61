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

// Lyapunov and energy functionals, formation-error norms and ultimate-bound
// compliance over trajectory logs.

#ifndef GPFORMATION_METRICS_HPP_
#define GPFORMATION_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpformation/rigidity.hpp"

namespace gpformation {

// One sample per integration step. p, v, u, e, mu and f_true are in the
// scenario's raw units; lyapunov, delta_bar and error_norm are in controller
// units (lengths divided by the control length unit), where the ultimate
// bound applies.
struct LogRecord {
  double t = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd v;
  Eigen::VectorXd u;
  Eigen::VectorXd e;
  Eigen::VectorXd mu;      // stacked GP mean predictions, d per agent
  Eigen::VectorXd f_true;  // stacked unknown dynamics, d per agent
  double lyapunov = 0.0;
  double delta_bar = 0.0;
  double error_norm = 0.0;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  bool learning = true;
  double dt = 0.0;
  double length_unit = 1.0;
  int agents = 0;
  int dim = 0;
  int edges = 0;
};

struct TrajectoryLog {
  RunMetadata meta;
  std::vector<LogRecord> records;

  bool empty() const { return records.empty(); }
  // Checks strictly increasing, uniformly spaced time stamps and column
  // counts consistent with the metadata. Throws std::invalid_argument.
  void Validate() const;
};

// V(e, v) = 1/2 |e|^2 + |v|^2
double Lyapunov(const Eigen::Ref<const Eigen::VectorXd>& e,
                const Eigen::Ref<const Eigen::VectorXd>& v);

// V0 + V1 = 1/2 sum |v_i|^2 + 1/4 sum (|z_k|^2 - d_k^2)^2
double PotentialEnergy(const Eigen::Ref<const Eigen::VectorXd>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& v,
                       const FormationGraph& graph);

// |(e, v)|
double FormationErrorNorm(const Eigen::Ref<const Eigen::VectorXd>& e,
                          const Eigen::Ref<const Eigen::VectorXd>& v);

// Distance errors and velocities expressed with lengths measured in
// `length_unit`: e / L^2 and v / L.
struct ControllerErrors {
  Eigen::VectorXd e;
  Eigen::VectorXd v;
};
ControllerErrors ToControllerUnits(const Eigen::Ref<const Eigen::VectorXd>& e,
                                   const Eigen::Ref<const Eigen::VectorXd>& v,
                                   double length_unit);

// max_k | |z_k| - d_k |
double MaxEdgeLengthError(const FormationGraph& graph,
                          const Eigen::Ref<const Eigen::VectorXd>& p);

// max_i |v_i|
double MaxAgentSpeed(const Eigen::Ref<const Eigen::VectorXd>& v, int dim);

struct BoundComplianceReport {
  // First time after which error_norm stays <= bound until the end of the
  // log; empty when the final sample violates the bound.
  std::optional<double> t_settle;
  // Samples at or after `window_start` with error_norm > bound.
  std::size_t violations = 0;
  double max_excess = 0.0;
};

BoundComplianceReport BoundCompliance(const TrajectoryLog& log, double bound,
                                      double window_start);

}  // namespace gpformation

#endif  // GPFORMATION_METRICS_HPP_
