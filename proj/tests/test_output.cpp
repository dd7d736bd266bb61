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

#include <clocale>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gpformation/output.hpp"
#include "gpformation/scenario.hpp"

namespace gpformation {
namespace {

std::string FirstLine(const std::string& text) { return text.substr(0, text.find('\n')); }

const SimulationResult& PresetRun() {
  static const SimulationResult result = [] {
    ScenarioConfig c = LoadPreset("paper-fig1");
    c.schedule.duration = 1.0;
    c.schedule.learn_until = 0.8;
    return RunScenario(ToSimulationSetup(c));
  }();
  return result;
}

TEST(Format, SixSignificantDigits) {
  EXPECT_EQ(FormatNumber(0.0), "0");
  EXPECT_EQ(FormatNumber(1.0), "1");
  EXPECT_EQ(FormatNumber(3.14159265), "3.14159");
  EXPECT_EQ(FormatNumber(-123456789.0), "-1.23457e+08");
  EXPECT_EQ(FormatNumber(0.000123456789), "0.000123457");
  EXPECT_EQ(FormatNumber(450.0), "450");
}

TEST(Format, LocaleIndependent) {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous ? previous : "C";
  for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE"}) {
    if (std::setlocale(LC_NUMERIC, name)) break;
  }
  EXPECT_EQ(FormatNumber(2.5), "2.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Csv, GoldenHeaders) {
  EXPECT_EQ(PositionsHeader(4, 2), "t,x1,y1,x2,y2,x3,y3,x4,y4");
  EXPECT_EQ(PositionsHeader(2, 3), "t,x1,y1,z1,x2,y2,z2");
  EXPECT_EQ(LyapunovHeader(), "t,V,V_normalized");
  EXPECT_EQ(PredictionHeader(2), "t,f_x,f_y,mu_x,mu_y");
  EXPECT_EQ(PredictionHeader(3), "t,f_x,f_y,f_z,mu_x,mu_y,mu_z");
}

TEST(Csv, TablesMatchLog) {
  const SimulationResult& r = PresetRun();
  ASSERT_FALSE(r.aborted);
  std::ostringstream pos, lyap, pred;
  WritePositionsCsv(pos, r.log);
  WriteLyapunovCsv(lyap, r.log);
  WritePredictionCsv(pred, r.log, 0);
  EXPECT_EQ(FirstLine(pos.str()), "t,x1,y1,x2,y2,x3,y3,x4,y4");
  EXPECT_EQ(FirstLine(lyap.str()), "t,V,V_normalized");
  EXPECT_EQ(FirstLine(pred.str()), "t,f_x,f_y,mu_x,mu_y");

  std::istringstream lines(pos.str());
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line, "0,450,450,510,610,590,590,650,550");
  int rows = 1;
  while (std::getline(lines, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(rows, 101);

  std::istringstream ly(lyap.str());
  std::getline(ly, line);
  std::getline(ly, line);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "1");
  EXPECT_THROW(WritePredictionCsv(pred, r.log, 4), std::out_of_range);
}

TEST(Report, ContainsBoundSummary) {
  const SimulationResult& r = PresetRun();
  const RunSummary summary = Summarize("paper-fig1", LoadPreset("paper-fig1").graph, r);
  const nlohmann::json j = ReportJson(summary, r);
  EXPECT_EQ(j["name"], "paper-fig1");
  EXPECT_EQ(j["learning"], true);
  EXPECT_EQ(j["bounds"]["beta"].size(), 8u);
  EXPECT_EQ(j["bounds"]["gamma"].size(), 8u);
  EXPECT_TRUE(j["bounds"].contains("delta_bar_max"));
  EXPECT_TRUE(j["bounds"].contains("ultimate_bound"));
  EXPECT_TRUE(j["bounds"].contains("t_settle"));
  EXPECT_EQ(j["bounds"]["rkhs_norms_heuristic"], true);
  EXPECT_EQ(j["models"].size(), 4u);
  EXPECT_EQ(j["models"][0]["points"], 4u);
}

TEST(Svg, WellFormedDocuments) {
  const SimulationResult& r = PresetRun();
  const FormationGraph g = LoadPreset("paper-fig1").graph;
  for (const std::string& svg : {TrajectorySvg(r.log, g), LyapunovSvg(r.log), PredictionSvg(r.log, 2)}) {
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
  }
}

}  // namespace
}  // namespace gpformation
