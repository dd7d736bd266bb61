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

#include "gpformation/gp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

namespace gpformation {

void KernelHyperparams::Validate() const {
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw std::invalid_argument("signal_variance must be positive");
  }
  if (lengthscales.size() == 0) {
    throw std::invalid_argument("lengthscales must not be empty");
  }
  for (Eigen::Index l = 0; l < lengthscales.size(); ++l) {
    if (!(lengthscales[l] > 0.0) || !std::isfinite(lengthscales[l])) {
      throw std::invalid_argument("lengthscales must be positive");
    }
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw std::invalid_argument("noise_variance must be nonnegative");
  }
}

double KernelEval(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& x_prime,
                  const KernelHyperparams& hyper) {
  if (x.size() != x_prime.size() || x.size() != hyper.lengthscales.size()) {
    throw std::invalid_argument("kernel input dimension mismatch");
  }
  const double r2 =
      ((x - x_prime).array() / hyper.lengthscales.array()).square().sum();
  return hyper.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixXd GramMatrix(const Eigen::MatrixXd& inputs,
                           const KernelHyperparams& hyper) {
  const Eigen::Index m = inputs.rows();
  if (m < 1) throw std::invalid_argument("Gram matrix needs at least one input");
  if (inputs.cols() != hyper.lengthscales.size()) {
    throw std::invalid_argument("kernel input dimension mismatch");
  }
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    gram(j, j) = hyper.signal_variance + hyper.noise_variance;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      gram(i, j) = KernelEval(inputs.row(i).transpose(),
                              inputs.row(j).transpose(), hyper);
      gram(j, i) = gram(i, j);
    }
  }
  return gram;
}

Eigen::VectorXd CrossCovariance(const Eigen::MatrixXd& inputs,
                                const Eigen::Ref<const Eigen::VectorXd>& query,
                                const KernelHyperparams& hyper) {
  Eigen::VectorXd k(inputs.rows());
  for (Eigen::Index j = 0; j < inputs.rows(); ++j) {
    k[j] = KernelEval(query, inputs.row(j).transpose(), hyper);
  }
  return k;
}

// --- TrainingSet -------------------------------------------------------------

TrainingSet::TrainingSet(int input_dim, int output_dim,
                         std::optional<std::size_t> capacity)
    : input_dim_(input_dim), output_dim_(output_dim), capacity_(capacity) {
  if (input_dim < 1 || output_dim < 1) {
    throw std::invalid_argument("training set dimensions must be positive");
  }
  inputs_.resize(0, input_dim);
  outputs_.resize(0, output_dim);
}

void TrainingSet::AddPoint(const Eigen::Ref<const Eigen::VectorXd>& q,
                           const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (q.size() != input_dim_ || y.size() != output_dim_) {
    throw std::invalid_argument("training point dimension mismatch");
  }
  if (capacity_ && size_ >= *capacity_) {
    throw std::length_error("training set capacity exceeded (" +
                            std::to_string(*capacity_) + " points)");
  }
  if (static_cast<Eigen::Index>(size_) == inputs_.rows()) {
    const Eigen::Index grown = std::max<Eigen::Index>(8, 2 * inputs_.rows());
    inputs_.conservativeResize(grown, Eigen::NoChange);
    outputs_.conservativeResize(grown, Eigen::NoChange);
  }
  inputs_.row(size_) = q.transpose();
  outputs_.row(size_) = y.transpose();
  ++size_;
}

// --- GPRegressor -------------------------------------------------------------

GPRegressor GPRegressor::Prior(int input_dim, int output_dim,
                               const KernelHyperparams& hyper) {
  hyper.Validate();
  if (hyper.lengthscales.size() != input_dim) {
    throw std::invalid_argument("lengthscale count does not match input_dim");
  }
  GPRegressor model;
  model.input_dim_ = input_dim;
  model.output_dim_ = output_dim;
  model.hyper_ = hyper;
  model.inputs_.resize(0, input_dim);
  model.alpha_.resize(0, output_dim);
  return model;
}

GPRegressor GPRegressor::Fit(const TrainingSet& data,
                             const KernelHyperparams& hyper) {
  if (data.empty()) {
    throw std::invalid_argument("cannot fit a GP to an empty training set");
  }
  GPRegressor model = Prior(data.input_dim(), data.output_dim(), hyper);
  model.inputs_ = data.inputs();
  const Eigen::MatrixXd gram = GramMatrix(model.inputs_, hyper);
  const Eigen::Index m = gram.rows();

  model.llt_.compute(gram);
  double jitter = 1e-10 * hyper.signal_variance;
  while (model.llt_.info() != Eigen::Success) {
    if (jitter > 1e-4 * hyper.signal_variance * (1.0 + 1e-9)) {
      throw IllConditionedError(
          "Gram matrix is not positive definite after jitter escalation (m = " +
          std::to_string(m) + ")");
    }
    model.llt_.compute(gram + jitter * Eigen::MatrixXd::Identity(m, m));
    model.jitter_ = jitter;
    jitter *= 10.0;
  }
  model.alpha_ = model.llt_.solve(data.outputs());
  return model;
}

void GPRegressor::CheckQuery(
    const Eigen::Ref<const Eigen::VectorXd>& query) const {
  if (query.size() != input_dim_) {
    throw std::invalid_argument("query dimension mismatch");
  }
}

Eigen::VectorXd GPRegressor::PredictMean(
    const Eigen::Ref<const Eigen::VectorXd>& query) const {
  CheckQuery(query);
  if (empty()) return Eigen::VectorXd::Zero(output_dim_);
  const Eigen::VectorXd k = CrossCovariance(inputs_, query, hyper_);
  return alpha_.transpose() * k;
}

double GPRegressor::RawPosteriorVariance(
    const Eigen::Ref<const Eigen::VectorXd>& query) const {
  CheckQuery(query);
  if (empty()) return hyper_.signal_variance;
  const Eigen::VectorXd k = CrossCovariance(inputs_, query, hyper_);
  const Eigen::VectorXd w = llt_.matrixL().solve(k);
  return hyper_.signal_variance - w.squaredNorm();
}

Eigen::VectorXd GPRegressor::PredictVariance(
    const Eigen::Ref<const Eigen::VectorXd>& query) const {
  return Eigen::VectorXd::Constant(output_dim_,
                                   std::max(0.0, RawPosteriorVariance(query)));
}

Eigen::VectorXd GPRegressor::PosteriorMeanRkhsNorms() const {
  Eigen::VectorXd norms = Eigen::VectorXd::Zero(output_dim_);
  if (empty()) return norms;
  KernelHyperparams noiseless = hyper_;
  noiseless.noise_variance = 0.0;
  const Eigen::MatrixXd gram = GramMatrix(inputs_, noiseless);
  for (int i = 0; i < output_dim_; ++i) {
    const double q = alpha_.col(i).dot(gram * alpha_.col(i));
    norms[i] = std::sqrt(std::max(0.0, q));
  }
  return norms;
}

// --- Likelihood --------------------------------------------------------------

double LogMarginalLikelihood(const TrainingSet& data,
                             const KernelHyperparams& hyper) {
  if (data.empty()) {
    throw std::invalid_argument("log marginal likelihood of an empty set");
  }
  const Eigen::MatrixXd gram = GramMatrix(data.inputs(), hyper);
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw IllConditionedError("Gram matrix is not positive definite");
  }
  const Eigen::MatrixXd outputs = data.outputs();
  const Eigen::MatrixXd alpha = llt.solve(outputs);
  const double m = static_cast<double>(data.size());
  const double half_log_det =
      llt.matrixLLT().diagonal().array().log().sum();
  const double fit = 0.5 * (outputs.array() * alpha.array()).sum();
  return -fit - data.output_dim() *
                    (half_log_det + 0.5 * m * std::log(2.0 * std::numbers::pi));
}

KernelHyperparams DefaultHyperparams(const TrainingSet& data) {
  KernelHyperparams hyper;
  hyper.lengthscales = Eigen::VectorXd::Constant(data.input_dim(), 50.0);
  hyper.noise_variance = 1e-4;
  hyper.signal_variance = 1.0;
  if (data.size() >= 2) {
    const Eigen::MatrixXd y = data.outputs();
    const double n = static_cast<double>(y.size());
    const double mean = y.mean();
    const double var = (y.array() - mean).square().sum() / (n - 1.0);
    if (var > 0.0 && std::isfinite(var)) hyper.signal_variance = var;
  }
  return hyper;
}

namespace {

// log-space box; outside it the objective is +inf.
constexpr double kLogSignalMin = -18.420680743952367;  // log 1e-8
constexpr double kLogSignalMax = 23.025850929940457;   // log 1e10
constexpr double kLogLengthMin = -6.907755278982137;   // log 1e-3
constexpr double kLogLengthMax = 13.815510557964274;   // log 1e6
constexpr double kLogNoiseMin = -23.025850929940457;   // log 1e-10
constexpr double kLogNoiseMax = 18.420680743952367;    // log 1e8

struct Objective {
  const TrainingSet* data;
  int input_dim;
};

KernelHyperparams Unpack(const gsl_vector* theta, int input_dim) {
  KernelHyperparams hyper;
  hyper.signal_variance = std::exp(gsl_vector_get(theta, 0));
  hyper.lengthscales.resize(input_dim);
  for (int l = 0; l < input_dim; ++l) {
    hyper.lengthscales[l] = std::exp(gsl_vector_get(theta, 1 + l));
  }
  hyper.noise_variance = std::exp(gsl_vector_get(theta, 1 + input_dim));
  return hyper;
}

bool InBox(const gsl_vector* theta, int input_dim) {
  auto within = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!within(gsl_vector_get(theta, 0), kLogSignalMin, kLogSignalMax)) return false;
  for (int l = 0; l < input_dim; ++l) {
    if (!within(gsl_vector_get(theta, 1 + l), kLogLengthMin, kLogLengthMax)) {
      return false;
    }
  }
  return within(gsl_vector_get(theta, 1 + input_dim), kLogNoiseMin, kLogNoiseMax);
}

double NegativeLml(const gsl_vector* theta, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  if (!InBox(theta, obj->input_dim)) return std::numeric_limits<double>::max();
  try {
    const double value =
        -LogMarginalLikelihood(*obj->data, Unpack(theta, obj->input_dim));
    return std::isfinite(value) ? value : std::numeric_limits<double>::max();
  } catch (const IllConditionedError&) {
    return std::numeric_limits<double>::max();
  }
}

struct GslVectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct GslMinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* s) const {
    gsl_multimin_fminimizer_free(s);
  }
};

std::optional<std::pair<KernelHyperparams, double>> RunSimplex(
    const Objective& objective, const KernelHyperparams& start,
    const HyperOptOptions& options) {
  const int dim = objective.input_dim + 2;
  std::unique_ptr<gsl_vector, GslVectorDeleter> theta(gsl_vector_alloc(dim));
  std::unique_ptr<gsl_vector, GslVectorDeleter> step(gsl_vector_alloc(dim));
  gsl_vector_set(theta.get(), 0, std::log(start.signal_variance));
  for (int l = 0; l < objective.input_dim; ++l) {
    gsl_vector_set(theta.get(), 1 + l, std::log(start.lengthscales[l]));
  }
  gsl_vector_set(theta.get(), 1 + objective.input_dim,
                 std::log(std::max(start.noise_variance, 1e-10)));
  gsl_vector_set_all(step.get(), options.initial_step);

  gsl_multimin_function fn;
  fn.n = static_cast<std::size_t>(dim);
  fn.f = &NegativeLml;
  fn.params = const_cast<Objective*>(&objective);
  if (NegativeLml(theta.get(), fn.params) >= std::numeric_limits<double>::max()) {
    return std::nullopt;
  }

  std::unique_ptr<gsl_multimin_fminimizer, GslMinimizerDeleter> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, fn.n));
  gsl_multimin_fminimizer_set(solver.get(), &fn, theta.get(), step.get());
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, options.simplex_tolerance) == GSL_SUCCESS) {
      break;
    }
  }
  const double value = solver->fval;
  if (!(value < std::numeric_limits<double>::max())) return std::nullopt;
  return std::make_pair(Unpack(solver->x, objective.input_dim), -value);
}

struct GslErrorHandlerGuard {
  GslErrorHandlerGuard() : previous(gsl_set_error_handler_off()) {}
  ~GslErrorHandlerGuard() { gsl_set_error_handler(previous); }
  gsl_error_handler_t* previous;
};

}  // namespace

HyperOptResult OptimizeHyperparameters(const TrainingSet& data,
                                       const KernelHyperparams& init,
                                       const HyperOptOptions& options) {
  if (data.empty()) {
    throw std::invalid_argument("cannot optimize hyperparameters without data");
  }
  init.Validate();
  if (init.lengthscales.size() != data.input_dim()) {
    throw std::invalid_argument("lengthscale count does not match input_dim");
  }

  HyperOptResult result;
  result.hyper = init;
  double best = -std::numeric_limits<double>::infinity();
  bool init_ok = false;
  try {
    best = LogMarginalLikelihood(data, init);
    init_ok = std::isfinite(best);
  } catch (const IllConditionedError&) {
  }
  result.initial_log_likelihood = best;

  const GslErrorHandlerGuard guard;
  const Objective objective{&data, data.input_dim()};
  bool any_ok = init_ok;
  for (const double scale : {1.0, 0.1, 10.0}) {
    KernelHyperparams start = init;
    start.lengthscales *= scale;
    const auto found = RunSimplex(objective, start, options);
    if (!found) continue;
    any_ok = true;
    if (found->second > best) {
      best = found->second;
      result.hyper = found->first;
    }
  }
  result.failed = !any_ok;
  result.log_likelihood = best;
  return result;
}

}  // namespace gpformation
