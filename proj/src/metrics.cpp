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

#include "gpformation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpformation {

void TrajectoryLog::Validate() const {
  const Eigen::Index nd = static_cast<Eigen::Index>(meta.agents) * meta.dim;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LogRecord& r = records[i];
    if (r.p.size() != nd || r.v.size() != nd || r.u.size() != nd ||
        r.mu.size() != nd || r.f_true.size() != nd || r.e.size() != meta.edges) {
      throw std::invalid_argument("log record " + std::to_string(i) +
                                  " has inconsistent column counts");
    }
    if (i == 0) continue;
    const double step = r.t - records[i - 1].t;
    if (!(step > 0.0)) throw std::invalid_argument("log times are not increasing");
    if (std::abs(step - meta.dt) > 1e-9 * std::max(1.0, r.t)) {
      throw std::invalid_argument("log times are not uniformly spaced");
    }
  }
}

double Lyapunov(const Eigen::Ref<const Eigen::VectorXd>& e,
                const Eigen::Ref<const Eigen::VectorXd>& v) {
  return 0.5 * e.squaredNorm() + v.squaredNorm();
}

double PotentialEnergy(const Eigen::Ref<const Eigen::VectorXd>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& v,
                       const FormationGraph& graph) {
  const Eigen::VectorXd e =
      DistanceErrors(RelativePositions(graph, p), graph.desired_lengths, graph.dim);
  return 0.5 * v.squaredNorm() + 0.25 * e.squaredNorm();
}

double FormationErrorNorm(const Eigen::Ref<const Eigen::VectorXd>& e,
                          const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::sqrt(e.squaredNorm() + v.squaredNorm());
}

ControllerErrors ToControllerUnits(const Eigen::Ref<const Eigen::VectorXd>& e,
                                   const Eigen::Ref<const Eigen::VectorXd>& v,
                                   double length_unit) {
  if (!(length_unit > 0.0)) throw std::invalid_argument("length unit must be positive");
  return {e / (length_unit * length_unit), v / length_unit};
}

double MaxEdgeLengthError(const FormationGraph& graph,
                          const Eigen::Ref<const Eigen::VectorXd>& p) {
  const Eigen::VectorXd z = RelativePositions(graph, p);
  double worst = 0.0;
  for (int k = 0; k < graph.edge_count(); ++k) {
    worst = std::max(worst, std::abs(z.segment(graph.dim * k, graph.dim).norm() -
                                     graph.desired_lengths[k]));
  }
  return worst;
}

double MaxAgentSpeed(const Eigen::Ref<const Eigen::VectorXd>& v, int dim) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i + dim <= v.size(); i += dim) {
    worst = std::max(worst, v.segment(i, dim).norm());
  }
  return worst;
}

BoundComplianceReport BoundCompliance(const TrajectoryLog& log, double bound,
                                      double window_start) {
  if (log.empty()) throw std::invalid_argument("bound compliance on an empty log");
  BoundComplianceReport report;
  // Scan backwards for the last violation.
  std::optional<std::size_t> last_violation;
  for (std::size_t i = log.records.size(); i-- > 0;) {
    if (log.records[i].error_norm > bound) {
      last_violation = i;
      break;
    }
  }
  if (!last_violation) {
    report.t_settle = log.records.front().t;
  } else if (*last_violation + 1 < log.records.size()) {
    report.t_settle = log.records[*last_violation + 1].t;
  }
  for (const LogRecord& r : log.records) {
    if (r.t < window_start) continue;
    if (r.error_norm > bound) {
      ++report.violations;
      report.max_excess = std::max(report.max_excess, r.error_norm - bound);
    }
  }
  return report;
}

}  // namespace gpformation
