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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gpformation/metrics.hpp"
#include "gpformation/scenario.hpp"
#include "gpformation/sim.hpp"

namespace gpformation {
namespace {

FormationGraph UnitSquare() {
  FormationGraph g;
  g.n = 4;
  g.dim = 2;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  g.desired_lengths = Eigen::VectorXd::Ones(5);
  g.desired_lengths[4] = std::sqrt(2.0);
  return g;
}

Eigen::VectorXd UnitSquarePositions() {
  Eigen::VectorXd p(8);
  p << 0, 0, 0, 1, 1, 1, 1, 0;
  return p;
}

std::vector<GPRegressor> PriorModels(int n, int dim) {
  KernelHyperparams h;
  h.lengthscales = Eigen::VectorXd::Ones(2 * dim);
  h.noise_variance = 1e-4;
  return std::vector<GPRegressor>(static_cast<std::size_t>(n), GPRegressor::Prior(2 * dim, dim, h));
}

ControlGains Gains(int n, double k = 2.0) { return {Eigen::VectorXd::Constant(n, k), 1.0}; }

AgentFunction Constant(Eigen::Vector2d value) {
  return [value](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return value;
  };
}

SimulationSetup ZeroDisturbanceSetup(double duration) {
  SimulationSetup s;
  s.graph = UnitSquare();
  Eigen::VectorXd p = UnitSquarePositions();
  p << 0.1, -0.05, -0.1, 1.1, 1.05, 0.9, 0.95, 0.1;
  s.initial = {p, Eigen::VectorXd::Zero(8), 0.0};
  s.dynamics.resize(4);
  s.gains = Gains(4);
  s.schedule.duration = duration;
  s.schedule.learn_until = std::min(duration, 2.6);
  s.learning = false;
  s.bounds.omega_grid = BoxGrid(4, 2, -1, 2, -1, 1, 2);
  return s;
}

TEST(ControlLaw, VanishesAtRestOnShape) {
  const FormationGraph g = UnitSquare();
  const SwarmState s{UnitSquarePositions(), Eigen::VectorXd::Zero(8), 0.0};
  const auto models = PriorModels(4, 2);
  const std::vector<AgentDynamics> dyn(4);
  EXPECT_LT(ControlLaw(s, g, models, dyn, Gains(4)).norm(), 1e-12);
}

TEST(ControlLaw, DampingOnlyOnShape) {
  const FormationGraph g = UnitSquare();
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(8, -2.0, 3.0);
  const SwarmState s{UnitSquarePositions(), v, 0.0};
  ControlGains gains = Gains(4);
  gains.damping << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd u = ControlLaw(s, g, PriorModels(4, 2), std::vector<AgentDynamics>(4), gains);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT((u.segment(2 * i, 2) + gains.damping[i] * v.segment(2 * i, 2)).norm(), 1e-12);
  }
}

TEST(ControlLaw, SingleEdgeRepulsion) {
  FormationGraph g;
  g.n = 2;
  g.edges = {{0, 1}};
  g.desired_lengths = Eigen::VectorXd::Constant(1, 2.0);
  const SwarmState s{Eigen::Vector4d(0, 0, 1, 0), Eigen::VectorXd::Zero(4), 0.0};
  const Eigen::VectorXd u =
      ControlLaw(s, g, PriorModels(2, 2), std::vector<AgentDynamics>(2), Gains(2, 1.0));
  EXPECT_TRUE(u.isApprox(Eigen::Vector4d(-3, 0, 3, 0)));
}

TEST(ControlLaw, LengthUnitScalesFormationTerm) {
  FormationGraph g;
  g.n = 2;
  g.edges = {{0, 1}};
  g.desired_lengths = Eigen::VectorXd::Constant(1, 2.0);
  const SwarmState s{Eigen::Vector4d(0, 0, 1, 0), Eigen::VectorXd::Zero(4), 0.0};
  ControlGains gains = Gains(2, 1.0);
  gains.length_unit = 10.0;
  const Eigen::VectorXd u = ControlLaw(s, g, PriorModels(2, 2), std::vector<AgentDynamics>(2), gains);
  EXPECT_TRUE(u.isApprox(Eigen::Vector4d(-0.03, 0, 0.03, 0)));
}

TEST(ControlLaw, SubtractsPriorAndGpMean) {
  const FormationGraph g = UnitSquare();
  const SwarmState s{UnitSquarePositions(), Eigen::VectorXd::Zero(8), 0.0};
  std::vector<AgentDynamics> dyn(4);
  dyn[1].prior_fhat = Constant({0.5, -1.0});
  auto models = PriorModels(4, 2);
  TrainingSet data(4, 2);
  data.AddPoint(s.AgentState(2, 2), Eigen::Vector2d(2.0, 3.0));
  KernelHyperparams h;
  h.lengthscales = Eigen::VectorXd::Ones(4);
  models[2] = GPRegressor::Fit(data, h);
  const Eigen::VectorXd u = ControlLaw(s, g, models, dyn, Gains(4));
  EXPECT_TRUE(u.segment(2, 2).isApprox(Eigen::Vector2d(-0.5, 1.0)));
  EXPECT_LT((u.segment(4, 2) - Eigen::Vector2d(-2.0, -3.0)).norm(), 1e-10);
}

TEST(ControlLaw, Decentralized) {
  // Agents 2 and 4 (0-based 1 and 3) share no edge in the square graph.
  const FormationGraph g = UnitSquare();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const Eigen::VectorXd p = UnitSquarePositions() + Eigen::VectorXd::NullaryExpr(8, [&] { return 0.2 * u(rng); });
  const Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(8, [&] { return u(rng); });
  auto models = PriorModels(4, 2);
  std::vector<AgentDynamics> dyn(4);
  const Eigen::VectorXd base = ControlLaw({p, v, 0.0}, g, models, dyn, Gains(4));

  // Change everything about agent 4 except nothing it shares with agent 2.
  Eigen::VectorXd p2 = p, v2 = v;
  p2.segment(6, 2) += Eigen::Vector2d(0.3, -0.7);
  v2.segment(6, 2) = Eigen::Vector2d(5, 5);
  TrainingSet data(4, 2);
  data.AddPoint(Eigen::VectorXd::Ones(4), Eigen::Vector2d(9, 9));
  KernelHyperparams h;
  h.lengthscales = Eigen::VectorXd::Ones(4);
  models[3] = GPRegressor::Fit(data, h);
  dyn[3].prior_fhat = Constant({4, 4});
  // Neighbours' velocities never enter another agent's block.
  v2.segment(0, 2) = Eigen::Vector2d(-8, 8);
  const Eigen::VectorXd changed = ControlLaw({p2, v2, 0.0}, g, models, dyn, Gains(4));
  EXPECT_EQ(changed.segment(2, 2), base.segment(2, 2));
}

TEST(Dynamics, DerivativeExamples) {
  const SwarmState s{Eigen::VectorXd::LinSpaced(8, 0, 7), Eigen::VectorXd::Zero(8), 0.0};
  const std::vector<AgentDynamics> zero(4);
  const StateDerivative d0 = TrueDerivative(s, Eigen::VectorXd::Zero(8), zero, 2);
  EXPECT_EQ(d0.p_dot, Eigen::VectorXd::Zero(8));
  EXPECT_EQ(d0.v_dot, Eigen::VectorXd::Zero(8));

  std::vector<AgentDynamics> builtin(4);
  builtin[0].true_f = BuiltinDynamics({"paper-f1", {}}, 2);
  SwarmState at{Eigen::VectorXd::Zero(8), Eigen::VectorXd::Ones(8), 0.0};
  at.p.head(2) = Eigen::Vector2d(450, 450);
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(8, 0.5);
  const StateDerivative d1 = TrueDerivative(at, u, builtin, 2);
  EXPECT_EQ(d1.p_dot, at.v);
  EXPECT_NEAR(d1.v_dot[0], 0.5 - 97.4349024921019, 1e-10);
  EXPECT_NEAR(d1.v_dot[1], 0.5 - 174.66092801870312, 1e-10);
  EXPECT_EQ(d1.v_dot.tail(6), u.tail(6));
}

TEST(Measure, OutputExamples) {
  std::mt19937_64 rng(1);
  AgentDynamics f3;
  f3.true_f = BuiltinDynamics({"paper-f3", {}}, 2);
  SwarmState s{Eigen::VectorXd::Zero(8), Eigen::VectorXd::Zero(8), 0.0};
  s.p.segment(4, 2) = Eigen::Vector2d(620.0, 600.0);
  const Eigen::Vector2d u(3.0, -4.0);
  EXPECT_TRUE(MeasureOutput(2, s, u, f3, 2, 0.0, rng).isApprox(Eigen::Vector2d(50, 100)));

  AgentDynamics perfect = f3;
  perfect.prior_fhat = f3.true_f;
  EXPECT_EQ(MeasureOutput(2, s, u, perfect, 2, 0.0, rng), Eigen::Vector2d::Zero());

  const Eigen::VectorXd noisy = MeasureOutput(2, s, u, f3, 2, 0.1, rng);
  EXPECT_NE(noisy, Eigen::Vector2d(50, 100));
  EXPECT_LT((noisy - Eigen::Vector2d(50, 100)).norm(), 1.0);
  EXPECT_TRUE(ResidualFromAcceleration(Eigen::Vector2d(1, 2), Eigen::Vector2d(0.5, 0.5),
                                       Eigen::Vector2d(0.25, 1))
                  .isApprox(Eigen::Vector2d(0.25, 0.5)));
}

TEST(Measure, FitReproducesMeasurement) {
  std::mt19937_64 rng(2);
  AgentDynamics f1;
  f1.true_f = BuiltinDynamics({"paper-f1", {}}, 2);
  const SwarmState s{Eigen::VectorXd::LinSpaced(8, 400, 700), Eigen::VectorXd::Ones(8), 0.0};
  const Eigen::VectorXd y = MeasureOutput(1, s, Eigen::Vector2d(1, 1), f1, 2, 0.0, rng);
  TrainingSet data(4, 2);
  data.AddPoint(s.AgentState(1, 2), y);
  KernelHyperparams h;
  h.signal_variance = 1e4;
  h.lengthscales = Eigen::VectorXd::Constant(4, 50.0);
  const auto model = GPRegressor::Fit(data, h);
  EXPECT_LT((model.PredictMean(s.AgentState(1, 2)) - y).norm(), 1e-8);
}

TEST(Rk4, ZeroForcingIsExact) {
  const SwarmState s{Eigen::VectorXd::LinSpaced(8, 0, 7), Eigen::VectorXd::LinSpaced(8, -1, 2), 0.5};
  const std::vector<AgentDynamics> zero(4);
  const SwarmState next = Rk4Step(s, Eigen::VectorXd::Zero(8), zero, 2, 0.01);
  EXPECT_LT((next.p - (s.p + 0.01 * s.v)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(next.v, s.v);
  EXPECT_DOUBLE_EQ(next.t, 0.51);

  const Eigen::VectorXd u = Eigen::VectorXd::Constant(8, 2.0);
  const SwarmState held = Rk4Step(s, u, zero, 2, 0.1);
  EXPECT_LT((held.p - (s.p + 0.1 * s.v + 0.5 * 0.01 * u)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((held.v - (s.v + 0.1 * u)).cwiseAbs().maxCoeff(), 1e-14);
}

double OscillatorPeriodError(int steps) {
  std::vector<AgentDynamics> dyn(1);
  dyn[0].true_f = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return -p;
  };
  SwarmState s{Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0), 0.0};
  const double dt = 2.0 * M_PI / steps;
  for (int k = 0; k < steps; ++k) s = Rk4Step(s, Eigen::Vector2d::Zero(), dyn, 2, dt);
  Eigen::VectorXd err(4);
  err << s.p - Eigen::Vector2d(1.0, 0.0), s.v - Eigen::Vector2d(0.0, 1.0);
  return err.norm();
}

TEST(Rk4, FourthOrderOnHarmonicOscillator) {
  const double e1 = OscillatorPeriodError(40);
  const double e2 = OscillatorPeriodError(80);
  const double e3 = OscillatorPeriodError(160);
  EXPECT_NEAR(e1 / e2, 16.0, 3.0);
  EXPECT_NEAR(e2 / e3, 16.0, 3.0);
}

TEST(Rk4, RichardsonLocalErrorIsFifthOrder) {
  std::vector<AgentDynamics> dyn(1);
  dyn[0].true_f = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return -p;
  };
  const SwarmState s{Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(0.0, 1.0), 0.0};
  auto gap = [&](double dt) {
    const SwarmState one = Rk4Step(s, Eigen::Vector2d::Zero(), dyn, 2, dt);
    const SwarmState half = Rk4Step(s, Eigen::Vector2d::Zero(), dyn, 2, dt / 2);
    const SwarmState two = Rk4Step(half, Eigen::Vector2d::Zero(), dyn, 2, dt / 2);
    return std::hypot((one.p - two.p).norm(), (one.v - two.v).norm());
  };
  EXPECT_NEAR(gap(0.2) / gap(0.1), 32.0, 4.0);
}

TEST(Rk4, NonFiniteStateThrows) {
  std::vector<AgentDynamics> dyn(1);
  dyn[0].true_f = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(p.size(), std::numeric_limits<double>::infinity());
  };
  const SwarmState s{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 0.0};
  EXPECT_THROW(Rk4Step(s, Eigen::Vector2d::Zero(), dyn, 2, 0.01), SimulationError);
}

TEST(Schedule, Validation) {
  Schedule s;
  EXPECT_NO_THROW(s.Validate());
  EXPECT_EQ(s.Steps(), 600);
  EXPECT_EQ(s.StepsPer(0.2), 20);
  s.sample_period = 0.015;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = Schedule{};
  s.learn_until = 7.0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
  s = Schedule{};
  s.dt = 0.0;
  EXPECT_THROW(s.Validate(), std::invalid_argument);
}

TEST(Scenario, DefaultScheduleCollectsThirteenPoints) {
  const SimulationResult r = RunScenario(ToSimulationSetup(LoadPreset("paper-fig1")));
  ASSERT_FALSE(r.aborted) << r.diagnostic;
  for (const auto& model : r.models) EXPECT_EQ(model.size(), 13u);
  const std::vector<double> expected{0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.6};
  ASSERT_EQ(r.refit_times.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(r.refit_times[k], expected[k], 1e-12);
  EXPECT_NEAR(r.last_update_time, 2.6, 1e-12);
  EXPECT_EQ(r.log.records.size(), 601u);
  EXPECT_NO_THROW(r.log.Validate());
  // The GP mean is zero until the first refit.
  EXPECT_EQ(r.log.records[39].mu.norm(), 0.0);
  EXPECT_GT(r.log.records[40].mu.norm(), 0.0);
}

TEST(Scenario, BaselineMissesFormation) {
  ScenarioConfig config = LoadPreset("paper-fig1");
  config.learning = false;
  const SimulationResult r = RunScenario(ToSimulationSetup(config));
  ASSERT_FALSE(r.aborted);
  EXPECT_GT(MaxEdgeLengthError(config.graph, r.log.records.back().p), 10.0);
  for (const auto& model : r.models) EXPECT_TRUE(model.empty());
  EXPECT_TRUE(r.refit_times.empty());
  for (const auto& rec : r.log.records) EXPECT_EQ(rec.mu.norm(), 0.0);
}

TEST(Scenario, DeterministicGivenSeed) {
  ScenarioConfig config = LoadPreset("paper-fig1");
  config.measurement_noise = 0.5;
  config.seed = 42;
  const SimulationResult a = RunScenario(ToSimulationSetup(config));
  const SimulationResult b = RunScenario(ToSimulationSetup(config));
  ASSERT_EQ(a.log.records.size(), b.log.records.size());
  for (std::size_t k = 0; k < a.log.records.size(); ++k) {
    const LogRecord& x = a.log.records[k];
    const LogRecord& y = b.log.records[k];
    ASSERT_EQ(x.t, y.t);
    ASSERT_EQ(x.p, y.p);
    ASSERT_EQ(x.v, y.v);
    ASSERT_EQ(x.u, y.u);
    ASSERT_EQ(x.mu, y.mu);
    ASSERT_EQ(x.lyapunov, y.lyapunov);
    ASSERT_EQ(x.delta_bar, y.delta_bar);
  }
  config.seed = 43;
  const SimulationResult c = RunScenario(ToSimulationSetup(config));
  EXPECT_NE(c.log.records.back().p, a.log.records.back().p);
}

TEST(Scenario, ZeroDisturbanceConverges) {
  const SimulationResult r = RunScenario(ZeroDisturbanceSetup(20.0));
  ASSERT_FALSE(r.aborted) << r.diagnostic;
  EXPECT_LT(r.log.records.back().e.cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Scenario, EnergyNonincreasingWithoutDisturbance) {
  const SimulationSetup setup = ZeroDisturbanceSetup(6.0);
  const SimulationResult r = RunScenario(setup);
  ASSERT_FALSE(r.aborted);
  double last = PotentialEnergy(r.log.records[0].p, r.log.records[0].v, setup.graph);
  for (std::size_t k = 1; k < r.log.records.size(); ++k) {
    const double now = PotentialEnergy(r.log.records[k].p, r.log.records[k].v, setup.graph);
    EXPECT_LE(now, last + 1e-6);
    last = now;
  }
}

TEST(Scenario, FiniteDifferenceAccelerationRuns) {
  ScenarioConfig config = LoadPreset("paper-fig1");
  config.acceleration = AccelerationSource::kFiniteDifference;
  const SimulationResult r = RunScenario(ToSimulationSetup(config));
  ASSERT_FALSE(r.aborted) << r.diagnostic;
  EXPECT_EQ(r.models[0].size(), 13u);
}

TEST(Scenario, CapacityOverflowAbortsWithPartialLog) {
  ScenarioConfig config = LoadPreset("paper-fig1");
  config.capacity = 5;
  const SimulationResult r = RunScenario(ToSimulationSetup(config));
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.diagnostic.empty());
  EXPECT_FALSE(r.log.empty());
  EXPECT_LT(r.log.records.back().t, 1.3);
}

TEST(Scenario, BlowUpAbortsWithDiagnostic) {
  SimulationSetup setup = ZeroDisturbanceSetup(1.0);
  setup.dynamics[0].true_f = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return 1e306 * (p.array() + 1.0).matrix();
  };
  const SimulationResult r = RunScenario(setup);
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.diagnostic.empty());
}

}  // namespace
}  // namespace gpformation
