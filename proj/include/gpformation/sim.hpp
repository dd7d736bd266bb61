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

// Double-integrator swarm with unknown additive dynamics, the learning-based
// decentralized formation controller, fixed-step integration and the online
// data collection / refit loop.

#ifndef GPFORMATION_SIM_HPP_
#define GPFORMATION_SIM_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpformation/bounds.hpp"
#include "gpformation/gp.hpp"
#include "gpformation/metrics.hpp"
#include "gpformation/rigidity.hpp"

namespace gpformation {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SwarmState {
  Eigen::VectorXd p;
  Eigen::VectorXd v;
  double t = 0.0;

  // q_i = (p_i, v_i)
  Eigen::VectorXd AgentState(int agent, int dim) const;
  // All q_i stacked agent by agent.
  Eigen::VectorXd StackedAgentStates(int dim) const;
};

// Maps (p_i, v_i) to an acceleration in R^d.
using AgentFunction =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& p_i, const Eigen::VectorXd& v_i)>;

struct AgentDynamics {
  AgentFunction true_f;      // ground truth; empty means zero
  AgentFunction prior_fhat;  // controller-side estimate; empty means zero

  Eigen::VectorXd TrueF(const Eigen::VectorXd& p_i, const Eigen::VectorXd& v_i) const;
  Eigen::VectorXd PriorFhat(const Eigen::VectorXd& p_i, const Eigen::VectorXd& v_i) const;
};

struct Schedule {
  double sample_period = 0.2;
  double refit_period = 0.4;
  double learn_until = 2.6;
  double duration = 6.0;
  double dt = 0.01;

  void Validate() const;
  long Steps() const;
  long StepsPer(double period) const;
};

struct ControlGains {
  Eigen::VectorXd damping;  // k_i > 0 per agent; K (x) I_d acts on v
  // The formation term is evaluated with lengths measured in this unit:
  // L * R(z/L)^T e(z/L), i.e. R(z)^T e(z) / L^2. 1 gives the law verbatim.
  double length_unit = 1.0;
};

// u = -(K (x) I_d) v - R(z)^T e(z) / L^2 - fhat(p, v) - mu(q). Agent i's
// block only reads v_i, its incident edges, fhat_i and models[i].
Eigen::VectorXd ControlLaw(const SwarmState& state, const FormationGraph& graph,
                           std::span<const GPRegressor> models,
                           std::span<const AgentDynamics> dynamics,
                           const ControlGains& gains);

struct StateDerivative {
  Eigen::VectorXd p_dot;
  Eigen::VectorXd v_dot;
};

// p_dot = v, v_dot = u + f(p, v)
StateDerivative TrueDerivative(const SwarmState& state,
                               const Eigen::Ref<const Eigen::VectorXd>& u,
                               std::span<const AgentDynamics> dynamics, int dim);

// Classical RK4 with u held over the step. Throws SimulationError when the
// new state is not finite.
SwarmState Rk4Step(const SwarmState& state, const Eigen::Ref<const Eigen::VectorXd>& u,
                   std::span<const AgentDynamics> dynamics, int dim, double dt);

// y_i = v_dot_i - fhat_i(p_i, v_i) - u_i (+ N(0, noise_std^2) per component),
// with v_dot_i taken from the true dynamics at the sample instant.
Eigen::VectorXd MeasureOutput(int agent, const SwarmState& state,
                              const Eigen::Ref<const Eigen::VectorXd>& u_i,
                              const AgentDynamics& dynamics, int dim, double noise_std,
                              std::mt19937_64& rng);

// Same residual for an externally estimated acceleration.
Eigen::VectorXd ResidualFromAcceleration(const Eigen::VectorXd& v_dot_i,
                                         const Eigen::VectorXd& fhat_i,
                                         const Eigen::VectorXd& u_i);

enum class AccelerationSource { kExact, kFiniteDifference };

// Initial hyperparameters for each refit. Unset signal variance or empty
// lengthscales fall back to DefaultHyperparams.
struct HyperInit {
  std::optional<double> signal_variance;
  Eigen::VectorXd lengthscales;
  double noise_variance = 1e-4;

  KernelHyperparams For(const TrainingSet& data) const;
};

struct GpSettings {
  HyperInit init;
  bool optimize = true;
  HyperOptOptions optimizer;
  std::optional<std::size_t> capacity;
  double measurement_noise_std = 0.0;
  AccelerationSource acceleration = AccelerationSource::kExact;
};

struct SimulationSetup {
  FormationGraph graph;
  SwarmState initial;
  std::vector<AgentDynamics> dynamics;
  ControlGains gains;
  Schedule schedule;
  GpSettings gp;
  BoundConfig bounds;
  bool learning = true;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  void Validate() const;
};

struct SimulationResult {
  TrajectoryLog log;
  std::vector<GPRegressor> models;  // final (frozen) models
  ErrorBoundReport bounds;          // raw units, for the final models
  double ultimate_bound = 0.0;      // controller units
  double delta_bar_max = 0.0;       // controller units
  std::vector<double> refit_times;
  double last_update_time = 0.0;
  std::vector<std::string> warnings;
  bool aborted = false;
  std::string diagnostic;
};

// Runs the full schedule. Learning off gives the baseline: no data, mu = 0.
// Failures abort with a partial log and a diagnostic instead of throwing.
SimulationResult RunScenario(const SimulationSetup& setup);

}  // namespace gpformation

#endif  // GPFORMATION_SIM_HPP_
