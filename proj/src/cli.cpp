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

#include "gpformation/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpformation/output.hpp"
#include "gpformation/scenario.hpp"
#include "gpformation/sim.hpp"

namespace gpformation {

namespace {

struct RunFlags {
  std::string preset;
  std::string config_path;
  std::optional<std::string> learning;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> output;
  std::vector<std::string> sweep;
};

bool IsPreset(const std::string& name) {
  for (const std::string& preset : PresetNames()) {
    if (preset == name) return true;
  }
  return false;
}

ScenarioConfig Load(const std::string& preset, const std::string& path) {
  return preset.empty() ? LoadConfig(path) : LoadPreset(preset);
}

void ApplyOverrides(ScenarioConfig& config, const RunFlags& flags) {
  if (flags.learning) config.learning = *flags.learning == "on";
  if (flags.seed) config.seed = *flags.seed;
  if (flags.dt) config.schedule.dt = *flags.dt;
  if (flags.duration) {
    config.schedule.duration = *flags.duration;
    // A shorter horizon ends learning with it.
    config.schedule.learn_until = std::min(config.schedule.learn_until, *flags.duration);
  }
  config.Validate();
}

struct RunOutcome {
  int code = kExitOk;
  std::string message;
};

RunOutcome RunOne(ScenarioConfig config, const std::filesystem::path& dir) {
  RunOutcome outcome;
  std::ostringstream msg;
  const SimulationSetup setup = ToSimulationSetup(config);
  const SimulationResult result = RunScenario(setup);
  const RunSummary summary = Summarize(config.name, config.graph, result);
  try {
    WriteArtifacts(dir, config.graph, summary, result);
  } catch (const std::exception& err) {
    outcome.code = kExitIo;
    outcome.message = std::string("error: ") + err.what() + "\n";
    return outcome;
  }
  msg << config.name << " (learning " << (config.learning ? "on" : "off") << ", seed "
      << config.seed << ") -> " << dir.string() << "\n"
      << "  t_final            " << FormatNumber(result.log.empty() ? 0.0 : result.log.records.back().t)
      << "\n"
      << "  max edge error     " << FormatNumber(summary.final_max_edge_error) << "\n"
      << "  max agent speed    " << FormatNumber(summary.final_max_speed) << "\n"
      << "  ultimate bound     " << FormatNumber(result.ultimate_bound) << "\n"
      << "  T_settle           "
      << (summary.compliance.t_settle ? FormatNumber(*summary.compliance.t_settle)
                                      : std::string("none"))
      << "\n";
  for (const std::string& warning : result.warnings) msg << "  warning: " << warning << "\n";
  if (result.aborted) {
    msg << "error: simulation aborted: " << result.diagnostic << "\n";
    outcome.code = kExitSimulation;
  }
  outcome.message = msg.str();
  return outcome;
}

int Run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
  if (flags.sweep.empty()) {
    ScenarioConfig config = Load(flags.preset, flags.config_path);
    ApplyOverrides(config, flags);
    const RunOutcome outcome = RunOne(config, flags.output.value_or(config.output_dir));
    (outcome.code == kExitOk ? out : err) << outcome.message;
    return outcome.code;
  }

  // Sweep: every entry is a preset name or a config path, each written to
  // its own subdirectory of the output directory.
  std::vector<std::pair<ScenarioConfig, std::filesystem::path>> jobs;
  const std::filesystem::path root = flags.output.value_or("out");
  for (std::size_t k = 0; k < flags.sweep.size(); ++k) {
    const std::string& entry = flags.sweep[k];
    ScenarioConfig config = IsPreset(entry) ? LoadPreset(entry) : LoadConfig(entry);
    ApplyOverrides(config, flags);
    const std::string stem =
        IsPreset(entry) ? entry : std::filesystem::path(entry).stem().string();
    jobs.emplace_back(std::move(config), root / (std::to_string(k + 1) + "-" + stem));
  }
  std::vector<std::future<RunOutcome>> futures;
  for (const auto& [config, dir] : jobs) {
    futures.push_back(std::async(std::launch::async, [config = config, dir = dir] {
      try {
        return RunOne(config, dir);
      } catch (const std::exception& e) {
        return RunOutcome{kExitConfig, std::string("error: ") + e.what() + "\n"};
      }
    }));
  }
  int code = kExitOk;
  for (auto& future : futures) {
    const RunOutcome outcome = future.get();
    (outcome.code == kExitOk ? out : err) << outcome.message;
    code = std::max(code, outcome.code);
  }
  return code;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decentralized formation control with Gaussian-process learned dynamics"};
  app.require_subcommand(1);

  RunFlags flags;
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write its artifacts");
  auto* preset = run->add_option("--preset", flags.preset, "Built-in scenario name");
  auto* config = run->add_option("--config", flags.config_path, "Scenario file")
                     ->check(CLI::ExistingFile);
  auto* sweep = run->add_option("--sweep", flags.sweep,
                                "Comma-separated presets or scenario files, run concurrently")
                    ->delimiter(',');
  preset->excludes(config)->excludes(sweep);
  config->excludes(sweep);
  run->add_option("--learning", flags.learning, "Override learning")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--seed", flags.seed, "Override the random seed");
  run->add_option("--dt", flags.dt, "Override the integration step [s]")
      ->check(CLI::PositiveNumber);
  run->add_option("--duration", flags.duration, "Override the horizon [s]")
      ->check(CLI::PositiveNumber);
  run->add_option("--output", flags.output, "Output directory");

  std::string dump_preset, dump_path;
  CLI::App* dump = app.add_subcommand("dump-config", "Print a validated scenario file");
  auto* dump_p = dump->add_option("--preset", dump_preset, "Built-in scenario name");
  auto* dump_c =
      dump->add_option("--config", dump_path, "Scenario file")->check(CLI::ExistingFile);
  dump_p->excludes(dump_c);

  app.add_subcommand("presets", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) {
      if (flags.preset.empty() && flags.config_path.empty() && flags.sweep.empty()) {
        err << "error: run needs --preset, --config or --sweep\n";
        return kExitUsage;
      }
      return Run(flags, out, err);
    }
    if (dump->parsed()) {
      if (dump_preset.empty() && dump_path.empty()) {
        err << "error: dump-config needs --preset or --config\n";
        return kExitUsage;
      }
      out << SerializeConfig(Load(dump_preset, dump_path));
      return kExitOk;
    }
    for (const std::string& name : PresetNames()) out << name << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSimulation;
  }
}

}  // namespace gpformation
