#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lena {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (sgrad_evals_cum, F_full)
};

/// One series per trace file, labelled from the file name, built from the
/// rows carrying F_full. A trace without any logged objective is an error.
std::vector<PlotSeries> collect_series(const std::vector<std::string> &trace_paths);

/// CSV: series,sgrad_evals_cum,value (one row per point).
void write_plot_data(const std::vector<PlotSeries> &series, const std::string &path);

/// Self-contained line chart, log-scale y.
void write_plot_svg(const std::vector<PlotSeries> &series, const std::string &path);

/// Convenience wrapper: data file always, SVG when svg_path is nonempty.
void emit_plot(const std::vector<std::string> &trace_paths, const std::string &data_path,
               const std::string &svg_path = "");

}  // namespace lena
