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

// High-probability model-error bounds for the per-agent GP models and the
// resulting ultimate bound on the formation error.
//
// Channels are indexed agent-major: channel i * d + c is output c of agent i.

#ifndef GPFORMATION_BOUNDS_HPP_
#define GPFORMATION_BOUNDS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gpformation/gp.hpp"

namespace gpformation {

// Finite sample of the compact set Omega. Each agent block holds points in
// R^{2d} (rows); the joint grid is their Cartesian product. Since agent i's
// model depends only on q_i, maxima over the product grid are computed per
// block.
struct OmegaGrid {
  std::vector<Eigen::MatrixXd> agent_blocks;

  std::size_t agent_count() const { return agent_blocks.size(); }
};

// Axis-aligned box with `points_per_axis` evenly spaced values on every
// position axis in [pos_lo, pos_hi] and every velocity axis in
// [vel_lo, vel_hi]; the same block is used for each agent.
OmegaGrid BoxGrid(int agents, int dim, double pos_lo, double pos_hi,
                  double vel_lo, double vel_hi, int points_per_axis);

struct BoundConfig {
  double delta = 0.9;
  // One per channel; empty selects the surrogate 2 * ||posterior mean||_k.
  std::vector<double> rkhs_norms;
  OmegaGrid omega_grid;

  void Validate(std::size_t channels) const;
};

struct InformationGain {
  double value = 0.0;
  std::size_t selected = 0;
  bool capped = false;  // m + 1 exceeded the grid size
};

// Greedy maximization of 1/2 log|I + sigma^-2 K| over m + 1 grid points,
// using the model's kernel and noise variance. Each step adds the point with
// the largest posterior variance given the points already chosen.
InformationGain GreedyInformationGain(const GPRegressor& model,
                                      const Eigen::MatrixXd& grid,
                                      std::size_t m);

// sqrt(2 ||rho_j||_k^2 + 300 gamma_j ln^3((m + 1) / (1 - delta^(1/channels))))
double BetaCoefficient(double gamma, double rkhs_norm, double delta,
                       std::size_t m, std::size_t channels);

// || (beta_j * sigma_j(q)) ||_2 over all channels; q stacks q_i = (p_i, v_i).
double DeltaBar(std::span<const GPRegressor> models,
                const Eigen::Ref<const Eigen::VectorXd>& q,
                const Eigen::Ref<const Eigen::VectorXd>& beta);

// sqrt(2) * max over the grid of DeltaBar. A grid approximation of the
// maximum over Omega.
double UltimateBound(std::span<const GPRegressor> models,
                     const Eigen::Ref<const Eigen::VectorXd>& beta,
                     const OmegaGrid& grid);

struct ErrorBoundReport {
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
  Eigen::VectorXd rkhs_norms;
  bool rkhs_norms_heuristic = false;
  bool information_gain_capped = false;
  double delta_bar_max = 0.0;
  double ultimate_bound = 0.0;  // sqrt(2) * delta_bar_max
};

ErrorBoundReport ComputeErrorBounds(std::span<const GPRegressor> models,
                                    const BoundConfig& config);

}  // namespace gpformation

#endif  // GPFORMATION_BOUNDS_HPP_
