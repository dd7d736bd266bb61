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

#include "gpformation/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gpformation {

OmegaGrid BoxGrid(int agents, int dim, double pos_lo, double pos_hi,
                  double vel_lo, double vel_hi, int points_per_axis) {
  if (agents < 1 || (dim != 2 && dim != 3) || points_per_axis < 1) {
    throw std::invalid_argument("invalid Omega grid request");
  }
  if (pos_lo > pos_hi || vel_lo > vel_hi) {
    throw std::invalid_argument("Omega box bounds are inverted");
  }
  const int axes = 2 * dim;
  std::size_t count = 1;
  for (int a = 0; a < axes; ++a) count *= static_cast<std::size_t>(points_per_axis);
  auto axis_value = [&](int axis, int index) {
    const bool position = axis < dim;
    const double lo = position ? pos_lo : vel_lo;
    const double hi = position ? pos_hi : vel_hi;
    if (points_per_axis == 1) return 0.5 * (lo + hi);
    return lo + (hi - lo) * index / (points_per_axis - 1);
  };

  Eigen::MatrixXd block(static_cast<Eigen::Index>(count), axes);
  for (std::size_t row = 0; row < count; ++row) {
    std::size_t rest = row;
    for (int a = axes - 1; a >= 0; --a) {
      block(static_cast<Eigen::Index>(row), a) =
          axis_value(a, static_cast<int>(rest % points_per_axis));
      rest /= points_per_axis;
    }
  }
  OmegaGrid grid;
  grid.agent_blocks.assign(static_cast<std::size_t>(agents), block);
  return grid;
}

void BoundConfig::Validate(std::size_t channels) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (omega_grid.agent_blocks.empty()) {
    throw std::invalid_argument("Omega grid is empty");
  }
  for (const auto& block : omega_grid.agent_blocks) {
    if (block.rows() == 0) throw std::invalid_argument("Omega grid block is empty");
  }
  if (!rkhs_norms.empty()) {
    if (rkhs_norms.size() != channels) {
      throw std::invalid_argument("expected " + std::to_string(channels) +
                                  " RKHS norms, got " +
                                  std::to_string(rkhs_norms.size()));
    }
    for (const double norm : rkhs_norms) {
      if (!(norm >= 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("RKHS norms must be nonnegative");
      }
    }
  }
}

InformationGain GreedyInformationGain(const GPRegressor& model,
                                      const Eigen::MatrixXd& grid,
                                      std::size_t m) {
  const KernelHyperparams& hyper = model.hyper();
  if (grid.rows() == 0) throw std::invalid_argument("information gain grid is empty");
  if (grid.cols() != model.input_dim()) {
    throw std::invalid_argument("grid dimension does not match the model");
  }
  if (!(hyper.noise_variance > 0.0)) {
    throw std::invalid_argument("information gain needs a positive noise variance");
  }

  InformationGain gain;
  const auto candidates = static_cast<std::size_t>(grid.rows());
  std::size_t picks = m + 1;
  if (picks > candidates) {
    picks = candidates;
    gain.capped = true;
  }

  // Incremental pivoted Cholesky of K + sigma^2 I restricted to the chosen
  // points: var[x] is the posterior variance given the picks so far and
  // factors.col(s) holds the s-th Cholesky column evaluated at every
  // candidate.
  const double noise = hyper.noise_variance;
  Eigen::VectorXd var = Eigen::VectorXd::Constant(grid.rows(), hyper.signal_variance);
  Eigen::MatrixXd factors(grid.rows(), static_cast<Eigen::Index>(picks));
  std::vector<bool> taken(candidates, false);
  for (std::size_t s = 0; s < picks; ++s) {
    Eigen::Index best = -1;
    for (Eigen::Index x = 0; x < grid.rows(); ++x) {
      if (taken[static_cast<std::size_t>(x)]) continue;
      if (best < 0 || var[x] > var[best]) best = x;
    }
    const double best_var = std::max(0.0, var[best]);
    gain.value += 0.5 * std::log1p(best_var / noise);
    taken[static_cast<std::size_t>(best)] = true;

    const double pivot = std::sqrt(best_var + noise);
    const auto col = static_cast<Eigen::Index>(s);
    for (Eigen::Index x = 0; x < grid.rows(); ++x) {
      double c = KernelEval(grid.row(x).transpose(), grid.row(best).transpose(), hyper);
      if (col > 0) c -= factors.row(x).head(col).dot(factors.row(best).head(col));
      factors(x, col) = c / pivot;
      var[x] -= factors(x, col) * factors(x, col);
    }
  }
  gain.selected = picks;
  return gain;
}

double BetaCoefficient(double gamma, double rkhs_norm, double delta,
                       std::size_t m, std::size_t channels) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(gamma >= 0.0) || !(rkhs_norm >= 0.0) || channels == 0) {
    throw std::invalid_argument("invalid beta coefficient inputs");
  }
  const double denom = 1.0 - std::pow(delta, 1.0 / static_cast<double>(channels));
  const double arg = (static_cast<double>(m) + 1.0) / denom;
  if (!(arg > 1.0) || !std::isfinite(arg)) {
    throw std::invalid_argument("beta log argument must exceed 1");
  }
  const double log_term = std::log(arg);
  // sqrt(2) * sqrt(B^2 + 150 ...) so that gamma = 0 gives sqrt(2) * B exactly.
  return std::sqrt(2.0) *
         std::sqrt(rkhs_norm * rkhs_norm + 150.0 * gamma * log_term * log_term * log_term);
}

namespace {

Eigen::Index TotalChannels(std::span<const GPRegressor> models) {
  Eigen::Index channels = 0;
  for (const auto& model : models) channels += model.output_dim();
  return channels;
}

}  // namespace

double DeltaBar(std::span<const GPRegressor> models,
                const Eigen::Ref<const Eigen::VectorXd>& q,
                const Eigen::Ref<const Eigen::VectorXd>& beta) {
  if (beta.size() != TotalChannels(models)) {
    throw std::invalid_argument("beta has the wrong number of channels");
  }
  double sum = 0.0;
  Eigen::Index q_offset = 0;
  Eigen::Index channel = 0;
  for (const auto& model : models) {
    if (q_offset + model.input_dim() > q.size()) {
      throw std::invalid_argument("stacked state is too short for the models");
    }
    const Eigen::VectorXd var = model.PredictVariance(q.segment(q_offset, model.input_dim()));
    for (int c = 0; c < model.output_dim(); ++c, ++channel) {
      sum += beta[channel] * beta[channel] * var[c];
    }
    q_offset += model.input_dim();
  }
  if (q_offset != q.size()) throw std::invalid_argument("stacked state size mismatch");
  return std::sqrt(sum);
}

double UltimateBound(std::span<const GPRegressor> models,
                     const Eigen::Ref<const Eigen::VectorXd>& beta,
                     const OmegaGrid& grid) {
  if (grid.agent_count() != models.size()) {
    throw std::invalid_argument("Omega grid has the wrong number of agent blocks");
  }
  if (beta.size() != TotalChannels(models)) {
    throw std::invalid_argument("beta has the wrong number of channels");
  }
  // The squared DeltaBar is a sum of per-agent terms, so its maximum over
  // the product grid is the sum of per-block maxima.
  double sum = 0.0;
  Eigen::Index channel = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& model = models[i];
    const Eigen::MatrixXd& block = grid.agent_blocks[i];
    if (block.rows() == 0) throw std::invalid_argument("Omega grid block is empty");
    double best = 0.0;
    for (Eigen::Index x = 0; x < block.rows(); ++x) {
      const Eigen::VectorXd var = model.PredictVariance(block.row(x).transpose());
      double term = 0.0;
      for (int c = 0; c < model.output_dim(); ++c) {
        term += beta[channel + c] * beta[channel + c] * var[c];
      }
      best = std::max(best, term);
    }
    sum += best;
    channel += model.output_dim();
  }
  return std::sqrt(2.0) * std::sqrt(sum);
}

ErrorBoundReport ComputeErrorBounds(std::span<const GPRegressor> models,
                                    const BoundConfig& config) {
  const auto channels = static_cast<std::size_t>(TotalChannels(models));
  config.Validate(channels);
  if (config.omega_grid.agent_count() != models.size()) {
    throw std::invalid_argument("Omega grid has the wrong number of agent blocks");
  }

  ErrorBoundReport report;
  report.gamma.resize(static_cast<Eigen::Index>(channels));
  report.beta.resize(static_cast<Eigen::Index>(channels));
  report.rkhs_norms.resize(static_cast<Eigen::Index>(channels));
  report.rkhs_norms_heuristic = config.rkhs_norms.empty();

  Eigen::Index channel = 0;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& model = models[i];
    const InformationGain gain =
        GreedyInformationGain(model, config.omega_grid.agent_blocks[i], model.size());
    report.information_gain_capped |= gain.capped;
    const Eigen::VectorXd surrogate = 2.0 * model.PosteriorMeanRkhsNorms();
    for (int c = 0; c < model.output_dim(); ++c, ++channel) {
      report.gamma[channel] = gain.value;
      report.rkhs_norms[channel] = report.rkhs_norms_heuristic
                                       ? surrogate[c]
                                       : config.rkhs_norms[static_cast<std::size_t>(channel)];
      report.beta[channel] = BetaCoefficient(gain.value, report.rkhs_norms[channel],
                                             config.delta, model.size(), channels);
    }
  }
  report.ultimate_bound = UltimateBound(models, report.beta, config.omega_grid);
  report.delta_bar_max = report.ultimate_bound / std::sqrt(2.0);
  return report;
}

}  // namespace gpformation
