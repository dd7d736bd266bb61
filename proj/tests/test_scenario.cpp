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
#include <string>

#include <gtest/gtest.h>

#include "gpformation/scenario.hpp"

namespace gpformation {
namespace {

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

std::string ErrorOf(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"(
[graph]
nodes = 3
edges = 1-2, 2-3, 3-1
lengths = 1, 1, 1

[initial]
positions = 0, 0, 1, 0, 0.5, 0.8
)";

TEST(Preset, BuiltinScenario) {
  const ScenarioConfig c = LoadPreset("paper-fig1");
  EXPECT_EQ(c.graph.n, 4);
  EXPECT_EQ(c.graph.dim, 2);
  ASSERT_EQ(c.graph.edge_count(), 5);
  const int tails[] = {0, 1, 2, 3, 0}, heads[] = {1, 2, 3, 0, 2};
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(c.graph.edges[k].tail, tails[k]);
    EXPECT_EQ(c.graph.edges[k].head, heads[k]);
  }
  for (int k = 0; k < 4; ++k) EXPECT_EQ(c.graph.desired_lengths[k], 100.0);
  EXPECT_NEAR(c.graph.desired_lengths[4], 100.0 * std::sqrt(2.0), 1e-12);
  Eigen::VectorXd p0(8);
  p0 << 450, 450, 510, 610, 590, 590, 650, 550;
  EXPECT_EQ(c.initial_p, p0);
  EXPECT_EQ(c.initial_v, Eigen::VectorXd::Zero(8));
  EXPECT_EQ(c.gains, Eigen::VectorXd::Constant(4, 2.0));
  EXPECT_EQ(c.dynamics[0].name, "paper-f1");
  EXPECT_EQ(c.dynamics[1].name, "zero");
  EXPECT_EQ(c.dynamics[2].name, "paper-f3");
  EXPECT_EQ(c.schedule.dt, 0.01);
  EXPECT_EQ(c.schedule.duration, 6.0);
  EXPECT_EQ(c.schedule.sample_period, 0.2);
  EXPECT_EQ(c.schedule.refit_period, 0.4);
  EXPECT_EQ(c.schedule.learn_until, 2.6);
  EXPECT_TRUE(c.learning);
  EXPECT_THROW(LoadPreset("nope"), ConfigError);
}

TEST(Parse, MinimalConfigGetsDefaults) {
  const ScenarioConfig c = ParseConfig(kMinimal);
  EXPECT_EQ(c.graph.n, 3);
  EXPECT_EQ(c.initial_v, Eigen::VectorXd::Zero(6));
  EXPECT_EQ(c.gains, Eigen::VectorXd::Constant(3, 2.0));
  EXPECT_EQ(c.length_unit, 1.0);
  EXPECT_EQ(c.delta, 0.9);
  EXPECT_FALSE(c.signal_variance.has_value());
  EXPECT_EQ(c.lengthscales.size(), 0);
  EXPECT_TRUE(c.optimize);
  // No shape given: the desired shape is realized numerically.
  EXPECT_EQ(DesiredShapeRealization(c).size(), 6);
}

TEST(Parse, MissingDesiredLengthIsAnError) {
  const std::string err =
      ErrorOf(Replace(kMinimal, "lengths = 1, 1, 1", "lengths = 1, 1"));
  EXPECT_NE(err.find("line 5"), std::string::npos) << err;
  EXPECT_NE(err.find("desired lengths"), std::string::npos) << err;
  EXPECT_NE(ErrorOf(Replace(kMinimal, "lengths = 1, 1, 1\n", "")).find("lengths"),
            std::string::npos);
}

TEST(Parse, UnknownKeysAndSectionsRejected) {
  std::string err = ErrorOf(Replace(kMinimal, "nodes = 3", "nodes = 3\ncolour = red"));
  EXPECT_NE(err.find("line 4"), std::string::npos) << err;
  EXPECT_NE(err.find("colour"), std::string::npos) << err;
  err = ErrorOf(std::string(kMinimal) + "\n[extras]\n");
  EXPECT_NE(err.find("unknown section"), std::string::npos) << err;
  err = ErrorOf(std::string(kMinimal) + "[dynamics]\nwind = paper-f1\n");
  EXPECT_NE(err.find("wind"), std::string::npos) << err;
}

TEST(Parse, LineLevelDiagnostics) {
  EXPECT_NE(ErrorOf(Replace(kMinimal, "nodes = 3", "nodes = three")).find("line 3"),
            std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kMinimal, "1-2,", "1-5,")).find("outside"), std::string::npos);
  EXPECT_NE(ErrorOf(Replace(kMinimal, "nodes = 3", "nodes = 3\nnodes = 3")).find("duplicate"),
            std::string::npos);
  EXPECT_NE(ErrorOf(std::string(kMinimal) + "[dynamics]\nagent9 = zero\n").find("range"),
            std::string::npos);
  EXPECT_NE(ErrorOf(std::string(kMinimal) + "[dynamics]\nagent1 = tornado\n").find("tornado"),
            std::string::npos);
  EXPECT_NE(ErrorOf(std::string(kMinimal) + "[run]\nlearning = maybe\n").find("on/off"),
            std::string::npos);
  EXPECT_NE(ErrorOf(std::string(kMinimal) + "[bounds]\ndelta = 1.5\n").find("delta"),
            std::string::npos);
  EXPECT_NE(ErrorOf("[graph\n").find("line 1"), std::string::npos);
  EXPECT_NE(ErrorOf("nodes = 3\n").find("outside"), std::string::npos);
}

TEST(Validate, NonRigidShapeRejected) {
  const std::string square = R"(
[graph]
nodes = 4
edges = 1-2, 2-3, 3-4, 4-1
lengths = 1, 1, 1, 1
shape = 0, 0, 0, 1, 1, 1, 1, 0
[initial]
positions = 0, 0, 0, 1, 1, 1, 1, 0
)";
  EXPECT_NE(ErrorOf(square).find("rigid"), std::string::npos);
  const std::string wrong_shape = Replace(PresetText("paper-fig1"),
                                          "shape = 0, 0, 0, 100,", "shape = 0, 0, 0, 101,");
  EXPECT_NE(ErrorOf(wrong_shape).find("shape"), std::string::npos);
}

TEST(Validate, ScheduleInvariantsEnforced) {
  EXPECT_THROW(ParseConfig(std::string(kMinimal) + "[schedule]\nsample_period = 0.015\n"),
               ConfigError);
  EXPECT_THROW(ParseConfig(std::string(kMinimal) + "[schedule]\nduration = 2\n"), ConfigError);
}

TEST(RoundTrip, SerializeIsIdempotent) {
  for (const std::string& text :
       {PresetText("paper-fig1"), std::string(kMinimal),
        std::string(kMinimal) + "[dynamics]\nagent2 = custom-sinusoid amplitude=3 frequency=0.1\n"
                                "[prior]\nagent1 = custom-gaussian-bump center=2\n"
                                "[gp]\ncapacity = 40\nlengthscales = 1, 2, 3, 4\n"
                                "signal_variance = 2.5\nacceleration = finite-difference\n"
                                "[bounds]\nrkhs_norms = 1, 1, 1, 1, 1, 1\n"}) {
    const ScenarioConfig once = ParseConfig(text);
    const std::string first = SerializeConfig(once);
    const ScenarioConfig twice = ParseConfig(first);
    EXPECT_EQ(SerializeConfig(twice), first);
    EXPECT_EQ(twice.initial_p, once.initial_p);
    EXPECT_EQ(twice.graph.desired_lengths, once.graph.desired_lengths);
    EXPECT_EQ(twice.dynamics, once.dynamics);
    EXPECT_EQ(twice.priors, once.priors);
    EXPECT_EQ(ConfigHash(twice), ConfigHash(once));
  }
}

TEST(Hash, IgnoresOutputButNotContent) {
  ScenarioConfig c = LoadPreset("paper-fig1");
  const auto base = ConfigHash(c);
  c.output_dir = "elsewhere";
  EXPECT_EQ(ConfigHash(c), base);
  c.seed = 5;
  EXPECT_NE(ConfigHash(c), base);
}

TEST(Dynamics, BuiltinExamples) {
  const Eigen::VectorXd v = Eigen::Vector2d::Zero();
  const AgentFunction f3 = BuiltinDynamics({"paper-f3", {}}, 2);
  EXPECT_TRUE(f3(Eigen::Vector2d(123.0, 600.0), v).isApprox(Eigen::Vector2d(50, 100)));
  const AgentFunction f1 = BuiltinDynamics({"paper-f1", {}}, 2);
  EXPECT_TRUE(f1(Eigen::Vector2d(0.0, 0.0), v).isApprox(Eigen::Vector2d(0, 200)));
  EXPECT_NEAR(f1(Eigen::Vector2d(450.0, 450.0), v)[0], -97.4349024921019, 1e-10);
  EXPECT_FALSE(BuiltinDynamics({"zero", {}}, 2));
  const AgentFunction custom = BuiltinDynamics({"custom-sinusoid", {{"amplitude", 2.0}}}, 3);
  const Eigen::VectorXd out = custom(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_TRUE(out.isApprox(Eigen::Vector3d(0, 2, 0)));
  EXPECT_THROW(BuiltinDynamics({"unknown", {}}, 2), ConfigError);
  EXPECT_THROW(BuiltinDynamics({"paper-f1", {{"amplitude", 1.0}}}, 2), ConfigError);
}

TEST(Setup, CarriesConfiguration) {
  const ScenarioConfig c = LoadPreset("paper-fig1");
  const SimulationSetup s = ToSimulationSetup(c);
  EXPECT_EQ(s.gains.length_unit, 100.0);
  EXPECT_EQ(s.dynamics.size(), 4u);
  EXPECT_TRUE(static_cast<bool>(s.dynamics[0].true_f));
  EXPECT_FALSE(static_cast<bool>(s.dynamics[1].true_f));
  EXPECT_EQ(s.bounds.omega_grid.agent_count(), 4u);
  EXPECT_EQ(s.bounds.omega_grid.agent_blocks[0].rows(), 625);
  EXPECT_EQ(s.config_hash, ConfigHash(c));
  EXPECT_NO_THROW(s.Validate());
}

}  // namespace
}  // namespace gpformation
