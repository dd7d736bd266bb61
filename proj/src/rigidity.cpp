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

#include "gpformation/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/SVD>

namespace gpformation {

void FormationGraph::Validate() const {
  if (n < 2) throw std::invalid_argument("formation graph needs at least 2 nodes");
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  if (desired_lengths.size() != edge_count()) {
    throw std::invalid_argument("expected one desired length per edge (" +
                                std::to_string(edge_count()) + "), got " +
                                std::to_string(desired_lengths.size()));
  }
  std::set<std::pair<int, int>> seen;
  for (int k = 0; k < edge_count(); ++k) {
    const Edge& edge = edges[k];
    if (edge.tail < 0 || edge.tail >= n || edge.head < 0 || edge.head >= n) {
      throw std::invalid_argument("edge " + std::to_string(k + 1) +
                                  " references a node outside 1.." +
                                  std::to_string(n));
    }
    if (edge.tail == edge.head) {
      throw std::invalid_argument("edge " + std::to_string(k + 1) + " is a self-loop");
    }
    const auto key = std::minmax(edge.tail, edge.head);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("edge " + std::to_string(k + 1) +
                                  " duplicates an earlier edge");
    }
    if (!(desired_lengths[k] > 0.0) || !std::isfinite(desired_lengths[k])) {
      throw std::invalid_argument("desired length of edge " + std::to_string(k + 1) +
                                  " must be positive");
    }
  }
}

Eigen::MatrixXd IncidenceMatrix(const FormationGraph& graph) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(graph.n, graph.edge_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    b(graph.edges[k].tail, k) = 1.0;
    b(graph.edges[k].head, k) = -1.0;
  }
  return b;
}

Eigen::VectorXd RelativePositions(const FormationGraph& graph,
                                  const Eigen::Ref<const Eigen::VectorXd>& p) {
  const int d = graph.dim;
  if (p.size() != d * graph.n) throw std::invalid_argument("position size mismatch");
  Eigen::VectorXd z(d * graph.edge_count());
  for (int k = 0; k < graph.edge_count(); ++k) {
    z.segment(d * k, d) =
        p.segment(d * graph.edges[k].tail, d) - p.segment(d * graph.edges[k].head, d);
  }
  return z;
}

Eigen::VectorXd DistanceErrors(const Eigen::Ref<const Eigen::VectorXd>& z,
                               const Eigen::Ref<const Eigen::VectorXd>& desired_lengths,
                               int dim) {
  if (z.size() != dim * desired_lengths.size()) {
    throw std::invalid_argument("relative positions and desired lengths disagree");
  }
  Eigen::VectorXd e(desired_lengths.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    e[k] = z.segment(dim * k, dim).squaredNorm() - desired_lengths[k] * desired_lengths[k];
  }
  return e;
}

Eigen::MatrixXd RigidityMatrix(const FormationGraph& graph,
                               const Eigen::Ref<const Eigen::VectorXd>& p) {
  const int d = graph.dim;
  const Eigen::VectorXd z = RelativePositions(graph, p);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(graph.edge_count(), d * graph.n);
  for (int k = 0; k < graph.edge_count(); ++k) {
    r.block(k, d * graph.edges[k].tail, 1, d) = z.segment(d * k, d).transpose();
    r.block(k, d * graph.edges[k].head, 1, d) = -z.segment(d * k, d).transpose();
  }
  return r;
}

Eigen::VectorXd RigidityTransposeTimes(const FormationGraph& graph,
                                       const Eigen::Ref<const Eigen::VectorXd>& p,
                                       const Eigen::Ref<const Eigen::VectorXd>& e) {
  const int d = graph.dim;
  if (e.size() != graph.edge_count()) throw std::invalid_argument("error size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d * graph.n);
  for (int k = 0; k < graph.edge_count(); ++k) {
    const int tail = graph.edges[k].tail;
    const int head = graph.edges[k].head;
    const Eigen::VectorXd zk = p.segment(d * tail, d) - p.segment(d * head, d);
    out.segment(d * tail, d) += e[k] * zk;
    out.segment(d * head, d) -= e[k] * zk;
  }
  return out;
}

int NumericRank(const Eigen::MatrixXd& matrix, double tol) {
  if (matrix.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * s[0]) ++rank;
  }
  return rank;
}

int RigidRankTarget(int n, int dim) {
  const int target = dim == 2 ? 2 * n - 3 : 3 * n - 6;
  // Below the generic count (n < dim + 1) a complete graph is rigid with
  // rank n(n-1)/2.
  return std::max(std::min(target, n * (n - 1) / 2), 0);
}

RigidityReport RigidityCheck(const Framework& framework, double tol) {
  const FormationGraph& graph = framework.graph;
  if (graph.n < 2) throw std::invalid_argument("rigidity check needs n >= 2");
  RigidityReport report;
  report.rank = NumericRank(RigidityMatrix(graph, framework.p), tol);
  const int target = RigidRankTarget(graph.n, graph.dim);
  report.infinitesimally_rigid = report.rank == target;
  report.minimally_rigid =
      report.infinitesimally_rigid && graph.edge_count() == target;
  return report;
}

Eigen::VectorXd RealizeShape(const FormationGraph& graph, std::uint64_t seed,
                             int restarts) {
  graph.Validate();
  const int d = graph.dim;
  const double scale = graph.desired_lengths.maxCoeff();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-scale, scale);
  Eigen::VectorXd fallback;
  for (int attempt = 0; attempt < restarts; ++attempt) {
    Eigen::VectorXd p(d * graph.n);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = uniform(rng);
    for (int iter = 0; iter < 200; ++iter) {
      const Eigen::VectorXd e =
          DistanceErrors(RelativePositions(graph, p), graph.desired_lengths, d);
      // d e / d p = 2 R
      const Eigen::MatrixXd jac = 2.0 * RigidityMatrix(graph, p);
      const Eigen::VectorXd step =
          jac.completeOrthogonalDecomposition().solve(e);
      p -= step;
      if (step.norm() < 1e-14 * scale) break;
    }
    const Eigen::VectorXd z = RelativePositions(graph, p);
    double worst = 0.0;
    for (int k = 0; k < graph.edge_count(); ++k) {
      worst = std::max(worst, std::abs(z.segment(d * k, d).norm() - graph.desired_lengths[k]));
    }
    if (worst > 1e-9 * scale) continue;
    if (RigidityCheck(Framework{graph, p}).infinitesimally_rigid) return p;
    if (fallback.size() == 0) fallback = p;
  }
  return fallback;
}

}  // namespace gpformation
