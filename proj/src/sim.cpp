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

#include "gpformation/sim.hpp"

#include <cmath>
#include <future>
#include <utility>

namespace gpformation {

Eigen::VectorXd SwarmState::AgentState(int agent, int dim) const {
  Eigen::VectorXd q(2 * dim);
  q << p.segment(dim * agent, dim), v.segment(dim * agent, dim);
  return q;
}

Eigen::VectorXd SwarmState::StackedAgentStates(int dim) const {
  const auto agents = static_cast<int>(p.size() / dim);
  Eigen::VectorXd q(2 * p.size());
  for (int i = 0; i < agents; ++i) q.segment(2 * dim * i, 2 * dim) = AgentState(i, dim);
  return q;
}

Eigen::VectorXd AgentDynamics::TrueF(const Eigen::VectorXd& p_i,
                                     const Eigen::VectorXd& v_i) const {
  return true_f ? true_f(p_i, v_i) : Eigen::VectorXd::Zero(p_i.size());
}

Eigen::VectorXd AgentDynamics::PriorFhat(const Eigen::VectorXd& p_i,
                                         const Eigen::VectorXd& v_i) const {
  return prior_fhat ? prior_fhat(p_i, v_i) : Eigen::VectorXd::Zero(p_i.size());
}

// --- Schedule ----------------------------------------------------------------

namespace {

bool IsMultiple(double period, double dt) {
  const double ratio = period / dt;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

}  // namespace

void Schedule::Validate() const {
  for (const double value : {sample_period, refit_period, learn_until, duration, dt}) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("schedule values must be positive");
    }
  }
  if (!IsMultiple(sample_period, dt)) {
    throw std::invalid_argument("sample_period must be an integer multiple of dt");
  }
  if (!IsMultiple(refit_period, dt)) {
    throw std::invalid_argument("refit_period must be an integer multiple of dt");
  }
  if (learn_until > duration * (1.0 + 1e-12)) {
    throw std::invalid_argument("learn_until must not exceed duration");
  }
}

long Schedule::Steps() const {
  return static_cast<long>(std::floor(duration / dt + 1e-9));
}

long Schedule::StepsPer(double period) const {
  return static_cast<long>(std::llround(period / dt));
}

// --- Control and dynamics ----------------------------------------------------

Eigen::VectorXd ControlLaw(const SwarmState& state, const FormationGraph& graph,
                           std::span<const GPRegressor> models,
                           std::span<const AgentDynamics> dynamics,
                           const ControlGains& gains) {
  const int d = graph.dim;
  const int n = graph.n;
  if (state.p.size() != d * n || state.v.size() != d * n) {
    throw std::invalid_argument("state size does not match the graph");
  }
  if (gains.damping.size() != n || models.size() != static_cast<std::size_t>(n) ||
      dynamics.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("per-agent inputs do not match the graph");
  }
  const double scale = 1.0 / (gains.length_unit * gains.length_unit);
  const Eigen::VectorXd e =
      DistanceErrors(RelativePositions(graph, state.p), graph.desired_lengths, d);
  Eigen::VectorXd u = -scale * RigidityTransposeTimes(graph, state.p, e);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd p_i = state.p.segment(d * i, d);
    const Eigen::VectorXd v_i = state.v.segment(d * i, d);
    u.segment(d * i, d) -= gains.damping[i] * v_i + dynamics[i].PriorFhat(p_i, v_i) +
                           models[i].PredictMean(state.AgentState(i, d));
  }
  return u;
}

StateDerivative TrueDerivative(const SwarmState& state,
                               const Eigen::Ref<const Eigen::VectorXd>& u,
                               std::span<const AgentDynamics> dynamics, int dim) {
  StateDerivative out{state.v, u};
  for (std::size_t i = 0; i < dynamics.size(); ++i) {
    const auto offset = static_cast<Eigen::Index>(dim * i);
    out.v_dot.segment(offset, dim) +=
        dynamics[i].TrueF(state.p.segment(offset, dim), state.v.segment(offset, dim));
  }
  return out;
}

SwarmState Rk4Step(const SwarmState& state, const Eigen::Ref<const Eigen::VectorXd>& u,
                   std::span<const AgentDynamics> dynamics, int dim, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  auto shifted = [&](const StateDerivative& k, double h) {
    return SwarmState{state.p + h * k.p_dot, state.v + h * k.v_dot, state.t + h};
  };
  const StateDerivative k1 = TrueDerivative(state, u, dynamics, dim);
  const StateDerivative k2 = TrueDerivative(shifted(k1, 0.5 * dt), u, dynamics, dim);
  const StateDerivative k3 = TrueDerivative(shifted(k2, 0.5 * dt), u, dynamics, dim);
  const StateDerivative k4 = TrueDerivative(shifted(k3, dt), u, dynamics, dim);

  SwarmState next;
  next.p = state.p + dt / 6.0 * (k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot);
  next.v = state.v + dt / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  next.t = state.t + dt;
  if (!next.p.allFinite() || !next.v.allFinite()) {
    throw SimulationError("state became non-finite while integrating from t = " +
                          std::to_string(state.t));
  }
  return next;
}

Eigen::VectorXd ResidualFromAcceleration(const Eigen::VectorXd& v_dot_i,
                                         const Eigen::VectorXd& fhat_i,
                                         const Eigen::VectorXd& u_i) {
  return v_dot_i - fhat_i - u_i;
}

Eigen::VectorXd MeasureOutput(int agent, const SwarmState& state,
                              const Eigen::Ref<const Eigen::VectorXd>& u_i,
                              const AgentDynamics& dynamics, int dim, double noise_std,
                              std::mt19937_64& rng) {
  if (agent < 0 || dim * (agent + 1) > state.p.size()) {
    throw std::invalid_argument("agent index out of range");
  }
  const Eigen::VectorXd p_i = state.p.segment(dim * agent, dim);
  const Eigen::VectorXd v_i = state.v.segment(dim * agent, dim);
  const Eigen::VectorXd v_dot = u_i + dynamics.TrueF(p_i, v_i);
  Eigen::VectorXd y = ResidualFromAcceleration(v_dot, dynamics.PriorFhat(p_i, v_i), u_i);
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index c = 0; c < y.size(); ++c) y[c] += noise(rng);
  }
  return y;
}

// --- Setup -------------------------------------------------------------------

KernelHyperparams HyperInit::For(const TrainingSet& data) const {
  KernelHyperparams hyper = DefaultHyperparams(data);
  if (signal_variance) hyper.signal_variance = *signal_variance;
  if (lengthscales.size() > 0) hyper.lengthscales = lengthscales;
  hyper.noise_variance = noise_variance;
  return hyper;
}

void SimulationSetup::Validate() const {
  graph.Validate();
  schedule.Validate();
  const Eigen::Index nd = static_cast<Eigen::Index>(graph.n) * graph.dim;
  if (initial.p.size() != nd || initial.v.size() != nd) {
    throw std::invalid_argument("initial state size does not match the graph");
  }
  if (!initial.p.allFinite() || !initial.v.allFinite()) {
    throw std::invalid_argument("initial state must be finite");
  }
  if (dynamics.size() != static_cast<std::size_t>(graph.n)) {
    throw std::invalid_argument("expected one dynamics entry per agent");
  }
  if (gains.damping.size() != graph.n || (gains.damping.array() <= 0.0).any()) {
    throw std::invalid_argument("damping gains must be positive, one per agent");
  }
  if (!(gains.length_unit > 0.0)) throw std::invalid_argument("length_unit must be positive");
  if (gp.init.lengthscales.size() != 0 && gp.init.lengthscales.size() != 2 * graph.dim) {
    throw std::invalid_argument("initial lengthscales need one entry per state dimension");
  }
  if (gp.measurement_noise_std < 0.0) {
    throw std::invalid_argument("measurement noise must be nonnegative");
  }
  bounds.Validate(static_cast<std::size_t>(nd));
  if (bounds.omega_grid.agent_count() != static_cast<std::size_t>(graph.n)) {
    throw std::invalid_argument("Omega grid needs one block per agent");
  }
}

// --- Simulation loop ---------------------------------------------------------

namespace {

GPRegressor RefitAgent(const TrainingSet& data, const GpSettings& settings,
                       std::string* warning) {
  KernelHyperparams hyper = settings.init.For(data);
  if (settings.optimize) {
    const HyperOptResult opt = OptimizeHyperparameters(data, hyper, settings.optimizer);
    if (opt.failed) {
      *warning = "hyperparameter optimization failed; keeping the initial values";
    }
    hyper = opt.hyper;
  }
  return GPRegressor::Fit(data, hyper);
}

}  // namespace

SimulationResult RunScenario(const SimulationSetup& setup) {
  setup.Validate();
  const FormationGraph& graph = setup.graph;
  const int n = graph.n;
  const int d = graph.dim;
  const Schedule& schedule = setup.schedule;
  const double dt = schedule.dt;
  const double unit = setup.gains.length_unit;

  SimulationResult result;
  result.log.meta = {setup.seed, setup.config_hash, setup.learning, dt, unit,
                     n, d, graph.edge_count()};

  std::vector<TrainingSet> datasets(static_cast<std::size_t>(n),
                                    TrainingSet(2 * d, d, setup.gp.capacity));
  std::vector<GPRegressor> models;
  for (int i = 0; i < n; ++i) {
    models.push_back(GPRegressor::Prior(2 * d, d, setup.gp.init.For(datasets[0])));
  }
  ErrorBoundReport bounds = ComputeErrorBounds(models, setup.bounds);
  std::mt19937_64 rng(setup.seed);

  const long steps = schedule.Steps();
  const long sample_every = schedule.StepsPer(schedule.sample_period);
  const long refit_every = schedule.StepsPer(schedule.refit_period);
  const long learn_steps = static_cast<long>(std::floor(schedule.learn_until / dt + 1e-9));

  SwarmState state = setup.initial;
  Eigen::VectorXd prev_v = state.v;
  Eigen::VectorXd prev_u = Eigen::VectorXd::Zero(state.v.size());
  result.log.records.reserve(static_cast<std::size_t>(steps + 1));

  try {
    for (long step = 0; step <= steps; ++step) {
      state.t = static_cast<double>(step) * dt;
      Eigen::VectorXd u = ControlLaw(state, graph, models, setup.dynamics, setup.gains);

      if (setup.learning && step > 0 && step <= learn_steps) {
        const bool sample_tick = step % sample_every == 0;
        const bool refit_tick = step % refit_every == 0 ||
                                (step == learn_steps && sample_tick);
        if (sample_tick) {
          for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd u_i = u.segment(d * i, d);
            Eigen::VectorXd y;
            if (setup.gp.acceleration == AccelerationSource::kExact) {
              y = MeasureOutput(i, state, u_i, setup.dynamics[static_cast<std::size_t>(i)], d,
                                setup.gp.measurement_noise_std, rng);
            } else {
              const Eigen::VectorXd v_dot =
                  (state.v.segment(d * i, d) - prev_v.segment(d * i, d)) / dt;
              const Eigen::VectorXd p_i = state.p.segment(d * i, d);
              const Eigen::VectorXd v_i = state.v.segment(d * i, d);
              y = ResidualFromAcceleration(
                  v_dot, setup.dynamics[static_cast<std::size_t>(i)].PriorFhat(p_i, v_i),
                  prev_u.segment(d * i, d));
              if (setup.gp.measurement_noise_std > 0.0) {
                std::normal_distribution<double> noise(0.0, setup.gp.measurement_noise_std);
                for (Eigen::Index c = 0; c < y.size(); ++c) y[c] += noise(rng);
              }
            }
            datasets[static_cast<std::size_t>(i)].AddPoint(state.AgentState(i, d), y);
          }
        }
        if (refit_tick && !datasets[0].empty()) {
          std::vector<std::string> warnings(static_cast<std::size_t>(n));
          std::vector<std::future<GPRegressor>> pending;
          for (int i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            pending.push_back(std::async(std::launch::async, RefitAgent,
                                         std::cref(datasets[idx]), std::cref(setup.gp),
                                         &warnings[idx]));
          }
          for (int i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            models[idx] = pending[idx].get();
            if (!warnings[idx].empty()) {
              result.warnings.push_back("t = " + std::to_string(state.t) + ", agent " +
                                        std::to_string(i + 1) + ": " + warnings[idx]);
            }
          }
          bounds = ComputeErrorBounds(models, setup.bounds);
          result.refit_times.push_back(state.t);
          result.last_update_time = state.t;
          u = ControlLaw(state, graph, models, setup.dynamics, setup.gains);
        }
      }

      LogRecord record;
      record.t = state.t;
      record.p = state.p;
      record.v = state.v;
      record.u = u;
      record.e = DistanceErrors(RelativePositions(graph, state.p), graph.desired_lengths, d);
      record.mu.resize(d * n);
      record.f_true.resize(d * n);
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        record.mu.segment(d * i, d) = models[idx].PredictMean(state.AgentState(i, d));
        record.f_true.segment(d * i, d) = setup.dynamics[idx].TrueF(
            state.p.segment(d * i, d), state.v.segment(d * i, d));
      }
      const ControllerErrors scaled = ToControllerUnits(record.e, state.v, unit);
      record.lyapunov = Lyapunov(scaled.e, scaled.v);
      record.error_norm = FormationErrorNorm(scaled.e, scaled.v);
      record.delta_bar = DeltaBar(models, state.StackedAgentStates(d), bounds.beta) / unit;
      result.log.records.push_back(std::move(record));

      if (step == steps) break;
      prev_v = state.v;
      prev_u = u;
      state = Rk4Step(state, u, setup.dynamics, d, dt);
    }
  } catch (const std::exception& err) {
    result.aborted = true;
    result.diagnostic = "aborted at t = " + std::to_string(state.t) + ": " + err.what();
  }

  result.models = std::move(models);
  result.bounds = bounds;
  result.ultimate_bound = bounds.ultimate_bound / unit;
  result.delta_bar_max = bounds.delta_bar_max / unit;
  return result;
}

}  // namespace gpformation
