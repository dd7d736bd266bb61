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

// Formation graphs, incidence and rigidity matrices, squared distance errors
// and numeric rigidity tests.
//
// Nodes are 0-based here; configuration files use 1-based ids. For edge k
// with (tail, head) the relative position is z_k = p_tail - p_head. Only this
// orientation is stored; R(z)^T e is identical for either orientation.

#ifndef GPFORMATION_RIGIDITY_HPP_
#define GPFORMATION_RIGIDITY_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace gpformation {

struct Edge {
  int tail = 0;
  int head = 0;
};

struct FormationGraph {
  int n = 0;    // node count
  int dim = 2;  // ambient dimension, 2 or 3
  std::vector<Edge> edges;
  Eigen::VectorXd desired_lengths;  // one per edge

  int edge_count() const { return static_cast<int>(edges.size()); }

  // Throws std::invalid_argument on self-loops, duplicate undirected edges,
  // out-of-range ids or non-positive lengths.
  void Validate() const;
};

struct Framework {
  const FormationGraph& graph;
  Eigen::VectorXd p;  // stacked positions, dim * n
};

// n x |E|; +1 at the tail, -1 at the head.
Eigen::MatrixXd IncidenceMatrix(const FormationGraph& graph);

// Stacked z_k, size dim * |E|.
Eigen::VectorXd RelativePositions(const FormationGraph& graph,
                                  const Eigen::Ref<const Eigen::VectorXd>& p);

// e_k = |z_k|^2 - d_k^2
Eigen::VectorXd DistanceErrors(const Eigen::Ref<const Eigen::VectorXd>& z,
                               const Eigen::Ref<const Eigen::VectorXd>& desired_lengths,
                               int dim);

// |E| x dim*n, row k holds z_k^T at the tail block and -z_k^T at the head
// block. Equals 1/2 d(ell_G)/dp where ell_G stacks squared edge lengths.
Eigen::MatrixXd RigidityMatrix(const FormationGraph& graph,
                               const Eigen::Ref<const Eigen::VectorXd>& p);

// R(z)^T e without forming R; this is the formation term of the control law.
Eigen::VectorXd RigidityTransposeTimes(const FormationGraph& graph,
                                       const Eigen::Ref<const Eigen::VectorXd>& p,
                                       const Eigen::Ref<const Eigen::VectorXd>& e);

// Singular values above tol * sigma_max count toward the rank.
int NumericRank(const Eigen::MatrixXd& matrix, double tol = 1e-8);

struct RigidityReport {
  bool infinitesimally_rigid = false;
  bool minimally_rigid = false;
  int rank = 0;
};

// 2n-3 in the plane, 3n-6 in space (clamped at zero for tiny graphs).
int RigidRankTarget(int n, int dim);

RigidityReport RigidityCheck(const Framework& framework, double tol = 1e-8);

// Finds positions realizing the desired lengths by Gauss-Newton on the
// squared-distance residuals from seeded random starts. Prefers an
// infinitesimally rigid realization; returns a flexible one if that is all
// it finds, and an empty vector when no start reaches
// max |‖z_k‖ - d_k| <= 1e-9 * max d_k.
Eigen::VectorXd RealizeShape(const FormationGraph& graph, std::uint64_t seed,
                             int restarts = 20);

}  // namespace gpformation

#endif  // GPFORMATION_RIGIDITY_HPP_
