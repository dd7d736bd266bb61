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

#include "gpformation/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gpformation {

std::string FormatNumber(double value) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kAxes[] = {"x", "y", "z"};

template <typename Fn>
void WriteRows(std::ostream& out, const TrajectoryLog& log, Fn&& row) {
  std::string line;
  for (const LogRecord& r : log.records) {
    line = FormatNumber(r.t);
    row(r, line);
    line += '\n';
    out << line;
  }
}

void Append(std::string& line, double value) {
  line += ',';
  line += FormatNumber(value);
}

void CheckAgent(const TrajectoryLog& log, int agent) {
  if (agent < 0 || agent >= log.meta.agents) {
    throw std::out_of_range("agent index out of range");
  }
}

}  // namespace

std::string PositionsHeader(int agents, int dim) {
  std::string header = "t";
  for (int i = 1; i <= agents; ++i) {
    for (int a = 0; a < dim; ++a) header += std::string(",") + kAxes[a] + std::to_string(i);
  }
  return header;
}

std::string LyapunovHeader() { return "t,V,V_normalized"; }

std::string PredictionHeader(int dim) {
  std::string header = "t";
  for (int a = 0; a < dim; ++a) header += std::string(",f_") + kAxes[a];
  for (int a = 0; a < dim; ++a) header += std::string(",mu_") + kAxes[a];
  return header;
}

void WritePositionsCsv(std::ostream& out, const TrajectoryLog& log) {
  out << PositionsHeader(log.meta.agents, log.meta.dim) << '\n';
  WriteRows(out, log, [](const LogRecord& r, std::string& line) {
    for (Eigen::Index k = 0; k < r.p.size(); ++k) Append(line, r.p[k]);
  });
}

void WriteLyapunovCsv(std::ostream& out, const TrajectoryLog& log) {
  out << LyapunovHeader() << '\n';
  if (log.empty()) return;
  const double v0 = log.records.front().lyapunov;
  WriteRows(out, log, [v0](const LogRecord& r, std::string& line) {
    Append(line, r.lyapunov);
    Append(line, v0 > 0.0 ? r.lyapunov / v0 : 0.0);
  });
}

void WritePredictionCsv(std::ostream& out, const TrajectoryLog& log, int agent) {
  CheckAgent(log, agent);
  const int d = log.meta.dim;
  out << PredictionHeader(d) << '\n';
  WriteRows(out, log, [agent, d](const LogRecord& r, std::string& line) {
    for (int a = 0; a < d; ++a) Append(line, r.f_true[agent * d + a]);
    for (int a = 0; a < d; ++a) Append(line, r.mu[agent * d + a]);
  });
}

RunSummary Summarize(const std::string& name, const FormationGraph& graph,
                     const SimulationResult& result) {
  RunSummary summary;
  summary.name = name;
  if (result.log.empty()) return summary;
  const LogRecord& last = result.log.records.back();
  summary.final_max_edge_error = MaxEdgeLengthError(graph, last.p);
  summary.final_max_speed = MaxAgentSpeed(last.v, graph.dim);
  summary.compliance =
      BoundCompliance(result.log, result.ultimate_bound, result.last_update_time);
  return summary;
}

namespace {

nlohmann::json ToJson(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string Hex(std::uint64_t value) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, 16);
  return std::string(buf, res.ptr);
}

}  // namespace

nlohmann::json ReportJson(const RunSummary& summary, const SimulationResult& result) {
  const RunMetadata& meta = result.log.meta;
  nlohmann::json report;
  report["name"] = summary.name;
  report["seed"] = meta.seed;
  report["config_hash"] = Hex(meta.config_hash);
  report["learning"] = meta.learning;
  report["dt"] = meta.dt;
  report["length_unit"] = meta.length_unit;
  report["samples"] = result.log.records.size();
  report["final_time"] = result.log.empty() ? 0.0 : result.log.records.back().t;
  report["final_max_edge_error"] = summary.final_max_edge_error;
  report["final_max_speed"] = summary.final_max_speed;
  report["aborted"] = result.aborted;
  report["diagnostic"] = result.diagnostic;
  report["warnings"] = result.warnings;
  report["refit_times"] = result.refit_times;
  report["last_update_time"] = result.last_update_time;

  nlohmann::json bounds;
  bounds["gamma"] = ToJson(result.bounds.gamma);
  bounds["beta"] = ToJson(result.bounds.beta);
  bounds["rkhs_norms"] = ToJson(result.bounds.rkhs_norms);
  bounds["rkhs_norms_heuristic"] = result.bounds.rkhs_norms_heuristic;
  bounds["information_gain_capped"] = result.bounds.information_gain_capped;
  bounds["delta_bar_max"] = result.delta_bar_max;
  bounds["ultimate_bound"] = result.ultimate_bound;
  bounds["delta_bar_max_raw"] = result.bounds.delta_bar_max;
  bounds["ultimate_bound_raw"] = result.bounds.ultimate_bound;
  if (summary.compliance.t_settle) {
    bounds["t_settle"] = *summary.compliance.t_settle;
  } else {
    bounds["t_settle"] = nullptr;
  }
  bounds["violations_after_last_update"] = summary.compliance.violations;
  bounds["max_excess"] = summary.compliance.max_excess;
  report["bounds"] = bounds;

  nlohmann::json models = nlohmann::json::array();
  for (const GPRegressor& model : result.models) {
    nlohmann::json m;
    m["points"] = model.size();
    m["signal_variance"] = model.hyper().signal_variance;
    m["lengthscales"] = ToJson(model.hyper().lengthscales);
    m["noise_variance"] = model.hyper().noise_variance;
    m["jitter"] = model.jitter();
    models.push_back(m);
  }
  report["models"] = models;
  return report;
}

// --- SVG ---------------------------------------------------------------------

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color;
  bool dashed = false;
};

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label, bool equal_aspect = false)
      : title_(std::move(title)),
        x_label_(std::move(x_label)),
        y_label_(std::move(y_label)),
        equal_aspect_(equal_aspect) {}

  void Add(Series s) { series_.push_back(std::move(s)); }
  void AddSegment(double x0, double y0, double x1, double y1, std::string color) {
    segments_.push_back({x0, y0, x1, y1, std::move(color)});
  }

  std::string Render() const {
    double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf;
    auto extend = [&](double x, double y) {
      if (!std::isfinite(x) || !std::isfinite(y)) return;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    };
    for (const Series& s : series_) {
      for (std::size_t k = 0; k < s.x.size(); ++k) extend(s.x[k], s.y[k]);
    }
    for (const Segment& s : segments_) {
      extend(s.x0, s.y0);
      extend(s.x1, s.y1);
    }
    if (x_lo > x_hi) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    Pad(x_lo, x_hi);
    Pad(y_lo, y_hi);
    if (equal_aspect_) {
      const double sx = (x_hi - x_lo) / kPlotW, sy = (y_hi - y_lo) / kPlotH;
      const double s = std::max(sx, sy);
      const double cx = 0.5 * (x_lo + x_hi), cy = 0.5 * (y_lo + y_hi);
      x_lo = cx - 0.5 * s * kPlotW, x_hi = cx + 0.5 * s * kPlotW;
      y_lo = cy - 0.5 * s * kPlotH, y_hi = cy + 0.5 * s * kPlotH;
    }
    auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * kPlotW; };
    auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * kPlotH; };

    std::ostringstream svg;
    svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kWidth << R"(" height=")"
        << kHeight << R"(" font-family="sans-serif" font-size="12">)" << '\n';
    svg << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title_ << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
        << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
      const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
      svg << "<text x=\"" << Coord(px(xv)) << "\" y=\"" << kTop + kPlotH + 16
          << "\" text-anchor=\"middle\">" << FormatNumber(Round(xv)) << "</text>\n";
      svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << Coord(py(yv) + 4)
          << "\" text-anchor=\"end\">" << FormatNumber(Round(yv)) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 8
        << "\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
    svg << "<text x=\"14\" y=\"" << kTop + kPlotH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << kTop + kPlotH / 2 << ")\">" << y_label_ << "</text>\n";

    for (const Segment& s : segments_) {
      svg << "<line x1=\"" << Coord(px(s.x0)) << "\" y1=\"" << Coord(py(s.y0)) << "\" x2=\""
          << Coord(px(s.x1)) << "\" y2=\"" << Coord(py(s.y1)) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\"/>\n";
    }
    int legend_row = 0;
    for (const Series& s : series_) {
      svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
      svg << " points=\"";
      // At most ~1000 vertices per series keeps files small.
      const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 1000);
      for (std::size_t k = 0; k < s.x.size(); k += stride) {
        if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
        svg << Coord(px(s.x[k])) << ',' << Coord(py(s.y[k])) << ' ';
      }
      if (!s.x.empty()) svg << Coord(px(s.x.back())) << ',' << Coord(py(s.y.back()));
      svg << "\"/>\n";
      if (!s.label.empty()) {
        const int ly = kTop + 14 + 16 * legend_row++;
        svg << "<line x1=\"" << kLeft + kPlotW + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << kLeft + kPlotW + 30 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
            << "/>\n<text x=\"" << kLeft + kPlotW + 36 << "\" y=\"" << ly << "\">" << s.label
            << "</text>\n";
      }
    }
    svg << "</svg>\n";
    return svg.str();
  }

 private:
  struct Segment {
    double x0, y0, x1, y1;
    std::string color;
  };

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kWidth = 760;
  static constexpr int kHeight = 480;
  static constexpr int kLeft = 70;
  static constexpr int kTop = 34;
  static constexpr int kPlotW = 560;
  static constexpr int kPlotH = 400;

  static void Pad(double& lo, double& hi) {
    const double span = hi - lo;
    const double pad = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  }
  static double Round(double v) { return std::abs(v) < 1e-12 ? 0.0 : v; }
  static std::string Coord(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
  }

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  bool equal_aspect_;
  std::vector<Series> series_;
  std::vector<Segment> segments_;
};

const char* Color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

}  // namespace

std::string TrajectorySvg(const TrajectoryLog& log, const FormationGraph& graph) {
  const int d = log.meta.dim;
  SvgPlot plot("Agent trajectories", "x", "y", true);
  for (int i = 0; i < log.meta.agents; ++i) {
    Series s;
    s.label = "agent " + std::to_string(i + 1);
    s.color = Color(static_cast<std::size_t>(i));
    for (const LogRecord& r : log.records) {
      s.x.push_back(r.p[i * d]);
      s.y.push_back(r.p[i * d + 1]);
    }
    plot.Add(std::move(s));
  }
  if (!log.empty()) {
    const Eigen::VectorXd& p = log.records.back().p;
    for (const Edge& edge : graph.edges) {
      plot.AddSegment(p[edge.tail * d], p[edge.tail * d + 1], p[edge.head * d],
                      p[edge.head * d + 1], "#555555");
    }
  }
  return plot.Render();
}

std::string LyapunovSvg(const TrajectoryLog& log) {
  SvgPlot plot("Normalized Lyapunov function", "t [s]", "V / V(0)");
  Series s;
  s.label = "V/V(0)";
  s.color = Color(0);
  const double v0 = log.empty() ? 0.0 : log.records.front().lyapunov;
  for (const LogRecord& r : log.records) {
    s.x.push_back(r.t);
    s.y.push_back(v0 > 0.0 ? r.lyapunov / v0 : 0.0);
  }
  plot.Add(std::move(s));
  return plot.Render();
}

std::string PredictionSvg(const TrajectoryLog& log, int agent) {
  CheckAgent(log, agent);
  const int d = log.meta.dim;
  SvgPlot plot("Agent " + std::to_string(agent + 1) + ": unknown dynamics vs GP mean", "t [s]",
               "acceleration");
  for (int a = 0; a < d; ++a) {
    Series truth, mean;
    truth.label = std::string("f_") + kAxes[a];
    mean.label = std::string("mu_") + kAxes[a];
    truth.color = mean.color = Color(static_cast<std::size_t>(a));
    mean.dashed = true;
    for (const LogRecord& r : log.records) {
      truth.x.push_back(r.t);
      truth.y.push_back(r.f_true[agent * d + a]);
      mean.x.push_back(r.t);
      mean.y.push_back(r.mu[agent * d + a]);
    }
    plot.Add(std::move(truth));
    plot.Add(std::move(mean));
  }
  return plot.Render();
}

// --- Files -------------------------------------------------------------------

namespace {

template <typename Fn>
void WriteFile(const std::filesystem::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> WriteArtifacts(const std::filesystem::path& dir,
                                        const FormationGraph& graph,
                                        const RunSummary& summary,
                                        const SimulationResult& result) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, auto&& body) {
    WriteFile(dir / name, body);
    written.push_back(name);
  };
  const TrajectoryLog& log = result.log;
  emit("positions.csv", [&](std::ostream& out) { WritePositionsCsv(out, log); });
  emit("lyapunov.csv", [&](std::ostream& out) { WriteLyapunovCsv(out, log); });
  for (int i = 0; i < log.meta.agents; ++i) {
    const std::string suffix = "agent" + std::to_string(i + 1);
    emit("predictions_" + suffix + ".csv",
         [&](std::ostream& out) { WritePredictionCsv(out, log, i); });
    emit("predictions_" + suffix + ".svg",
         [&](std::ostream& out) { out << PredictionSvg(log, i); });
  }
  emit("trajectories.svg", [&](std::ostream& out) { out << TrajectorySvg(log, graph); });
  emit("lyapunov.svg", [&](std::ostream& out) { out << LyapunovSvg(log); });
  emit("report.json",
       [&](std::ostream& out) { out << ReportJson(summary, result).dump(2) << '\n'; });
  return written;
}

}  // namespace gpformation
