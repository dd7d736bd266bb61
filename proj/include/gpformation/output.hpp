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

// Run artifacts: CSV tables, the JSON run report and SVG plots.

#ifndef GPFORMATION_OUTPUT_HPP_
#define GPFORMATION_OUTPUT_HPP_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpformation/metrics.hpp"
#include "gpformation/rigidity.hpp"
#include "gpformation/sim.hpp"

namespace gpformation {

// 6 significant digits, '.' decimal point regardless of locale.
std::string FormatNumber(double value);

// t,x1,y1,...,xn,yn (z columns added in 3D)
std::string PositionsHeader(int agents, int dim);
// t,V,V_normalized with V_normalized = V / V(0)
std::string LyapunovHeader();
// t,f_x,f_y,mu_x,mu_y (z columns added in 3D)
std::string PredictionHeader(int dim);

void WritePositionsCsv(std::ostream& out, const TrajectoryLog& log);
void WriteLyapunovCsv(std::ostream& out, const TrajectoryLog& log);
void WritePredictionCsv(std::ostream& out, const TrajectoryLog& log, int agent);

struct RunSummary {
  std::string name;
  double final_max_edge_error = 0.0;
  double final_max_speed = 0.0;
  BoundComplianceReport compliance;
};

RunSummary Summarize(const std::string& name, const FormationGraph& graph,
                     const SimulationResult& result);

nlohmann::json ReportJson(const RunSummary& summary, const SimulationResult& result);

std::string TrajectorySvg(const TrajectoryLog& log, const FormationGraph& graph);
std::string LyapunovSvg(const TrajectoryLog& log);
std::string PredictionSvg(const TrajectoryLog& log, int agent);

// Writes every artifact into `dir` (created if needed) and returns the file
// names written. Throws std::runtime_error on I/O failure.
std::vector<std::string> WriteArtifacts(const std::filesystem::path& dir,
                                        const FormationGraph& graph,
                                        const RunSummary& summary,
                                        const SimulationResult& result);

}  // namespace gpformation

#endif  // GPFORMATION_OUTPUT_HPP_
