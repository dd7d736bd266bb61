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

// Exact Gaussian-process regression with an ARD squared-exponential kernel.
//
// Every output dimension of a model shares one kernel and one factorization
// of (K + sigma^2 I); only the right-hand sides differ.

#ifndef GPFORMATION_GP_HPP_
#define GPFORMATION_GP_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace gpformation {

// Raised when (K + sigma^2 I) cannot be factorized even after jitter.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelHyperparams {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;
  double noise_variance = 0.0;

  // Throws std::invalid_argument when a field is out of range.
  void Validate() const;
};

// k(x, x') = signal_variance * exp(-1/2 sum_l ((x_l - x'_l) / lengthscale_l)^2)
double KernelEval(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& x_prime,
                  const KernelHyperparams& hyper);

// Rows of `inputs` are the training inputs. Noise variance sits on the
// diagonal.
Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& inputs,
                           const KernelHyperparams& hyper);

// Cross-covariance vector k(q*, X).
Eigen::VectorXd CrossCovariance(const Eigen::MatrixXd& inputs,
                                const Eigen::Ref<const Eigen::VectorXd>& query,
                                const KernelHyperparams& hyper);

class TrainingSet {
 public:
  TrainingSet(int input_dim, int output_dim,
              std::optional<std::size_t> capacity = std::nullopt);

  // Appends one (q, y) pair. Throws std::length_error when the capacity
  // would be exceeded; points are never dropped.
  void AddPoint(const Eigen::Ref<const Eigen::VectorXd>& q,
                const Eigen::Ref<const Eigen::VectorXd>& y);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  std::optional<std::size_t> capacity() const { return capacity_; }

  // m x input_dim and m x output_dim views of the stored data.
  Eigen::MatrixXd inputs() const { return inputs_.topRows(size_); }
  Eigen::MatrixXd outputs() const { return outputs_.topRows(size_); }

 private:
  int input_dim_;
  int output_dim_;
  std::optional<std::size_t> capacity_;
  std::size_t size_ = 0;
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd outputs_;
};

// A fitted model, or the empty prior model when no data has been collected.
// Immutable after construction, so concurrent prediction is safe.
class GPRegressor {
 public:
  // Zero-mean prior with no data: mean 0, variance = signal_variance.
  static GPRegressor Prior(int input_dim, int output_dim,
                           const KernelHyperparams& hyper);

  // Factorizes (K + sigma^2 I). On failure jitter of 1e-10 * signal_variance
  // is added to the diagonal and escalated x10 up to 1e-4 * signal_variance
  // before IllConditionedError is thrown. Empty data is rejected with
  // std::invalid_argument.
  static GPRegressor Fit(const TrainingSet& data,
                         const KernelHyperparams& hyper);

  Eigen::VectorXd PredictMean(
      const Eigen::Ref<const Eigen::VectorXd>& query) const;
  Eigen::VectorXd PredictVariance(
      const Eigen::Ref<const Eigen::VectorXd>& query) const;

  // Posterior variance before clamping at zero (identical for every output).
  double RawPosteriorVariance(
      const Eigen::Ref<const Eigen::VectorXd>& query) const;

  // sqrt(alpha_i^T K alpha_i) per output, the RKHS norm of the posterior
  // mean. K excludes the noise term. Zero for the prior model.
  Eigen::VectorXd PosteriorMeanRkhsNorms() const;

  bool empty() const { return inputs_.rows() == 0; }
  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const KernelHyperparams& hyper() const { return hyper_; }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::MatrixXd& alpha() const { return alpha_; }

 private:
  GPRegressor() = default;
  void CheckQuery(const Eigen::Ref<const Eigen::VectorXd>& query) const;

  int input_dim_ = 0;
  int output_dim_ = 0;
  KernelHyperparams hyper_;
  Eigen::MatrixXd inputs_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd alpha_;  // (K + sigma^2 I)^-1 Y, one column per output
  double jitter_ = 0.0;
};

// Sum over outputs of -1/2 y^T A^-1 y - 1/2 log|A| - m/2 log(2 pi), with
// A = K + sigma^2 I. Throws IllConditionedError if A is not positive
// definite and std::invalid_argument for empty data.
double LogMarginalLikelihood(const TrainingSet& data,
                             const KernelHyperparams& hyper);

// Initial guess scaled to the formation scenario: signal variance from the
// pooled sample variance of the outputs (1 when m < 2 or the variance is
// zero), every lengthscale 50, noise variance 1e-4.
KernelHyperparams DefaultHyperparams(const TrainingSet& data);

struct HyperOptOptions {
  int max_iterations = 400;   // per restart
  double simplex_tolerance = 1e-6;
  double initial_step = 0.5;  // in log space
};

struct HyperOptResult {
  KernelHyperparams hyper;
  double log_likelihood = 0.0;
  double initial_log_likelihood = 0.0;
  // Set when every start failed to factorize; hyper is then the init.
  bool failed = false;
};

// Nelder-Mead in log-hyperparameter space, restarted from init and from
// init with lengthscales scaled by 0.1 and 10. The returned likelihood is
// never below the likelihood at init.
HyperOptResult OptimizeHyperparameters(const TrainingSet& data,
                                       const KernelHyperparams& init,
                                       const HyperOptOptions& options = {});

}  // namespace gpformation

#endif  // GPFORMATION_GP_HPP_
