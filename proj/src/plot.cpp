#include "lena/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "lena/trace.hpp"

namespace lena {

namespace {

std::string series_label(const std::string &path) {
  std::string stem = std::filesystem::path(path).stem().string();
  if (stem.rfind("trace_", 0) == 0) stem = stem.substr(6);
  return stem;
}

const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                         "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

}  // namespace

std::vector<PlotSeries> collect_series(const std::vector<std::string> &trace_paths) {
  require(!trace_paths.empty(), Errc::invalid_argument, "plot: no trace files given");
  std::vector<PlotSeries> series;
  series.reserve(trace_paths.size());
  for (const std::string &path : trace_paths) {
    const Trace trace = read_trace_csv(path);
    PlotSeries s;
    s.label = series_label(path);
    for (const TraceRecord &row : trace.rows) {
      if (row.objective)
        s.points.emplace_back(static_cast<double>(row.sgrad_evals_cum), *row.objective);
    }
    require(!s.points.empty(), Errc::invalid_argument,
            "trace " + path +
                " has no F_full values; enable objective logging (run.log_every > 0)");
    series.push_back(std::move(s));
  }
  return series;
}

void write_plot_data(const std::vector<PlotSeries> &series, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open plot data for writing: " + path);
  out << "series,sgrad_evals_cum,value\n";
  for (const auto &s : series)
    for (const auto &[x, y] : s.points)
      out << s.label << "," << format_double(x) << "," << format_double(y) << "\n";
  require(out.good(), Errc::io, "plot data write failed");
}

void write_plot_svg(const std::vector<PlotSeries> &series, const std::string &path) {
  const double width = 960, height = 600;
  const double ml = 80, mr = 220, mt = 40, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmax = 1.0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
  for (const auto &s : series)
    for (const auto &[x, y] : s.points) {
      xmax = std::max(xmax, x);
      const double yc = std::max(y, 1e-16);
      ymin = std::min(ymin, yc);
      ymax = std::max(ymax, yc);
    }
  if (!(ymin < ymax)) {
    ymin = std::max(ymin / 10.0, 1e-16);
    ymax = ymin * 100.0;
  }
  const double ly0 = std::floor(std::log10(ymin));
  const double ly1 = std::ceil(std::log10(ymax * 1.0000001));

  auto sx = [&](double x) { return ml + pw * x / xmax; };
  auto sy = [&](double y) {
    const double ly = std::log10(std::max(y, 1e-16));
    return mt + ph * (ly1 - ly) / std::max(ly1 - ly0, 1e-9);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
     << mt + ph << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
     << "\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(ly0); e <= static_cast<int>(ly1); ++e) {
    const double y = sy(std::pow(10.0, e));
    os << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
       << "\" stroke=\"#dddddd\"/>\n"
       << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
       << "\" font-size=\"12\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double x = ml + pw * i / 5.0;
    os << "<text x=\"" << x << "\" y=\"" << mt + ph + 20
       << "\" font-size=\"12\" text-anchor=\"middle\">" << format_double(xmax * i / 5.0)
       << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
     << "\" font-size=\"14\" text-anchor=\"middle\">stochastic gradient evaluations</text>\n"
     << "<text x=\"18\" y=\"" << mt + ph / 2
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
     << ")\">objective</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char *color = palette[i % (sizeof(palette) / sizeof(palette[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto &[x, y] : series[i].points) os << sx(x) << "," << sy(y) << " ";
    os << "\"/>\n";
    const double ly = mt + 16 + 16.0 * static_cast<double>(i);
    os << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 34
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
       << series[i].label << "</text>\n";
  }
  os << "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), Errc::io, "cannot open SVG for writing: " + path);
  out << os.str();
  require(out.good(), Errc::io, "SVG write failed");
}

void emit_plot(const std::vector<std::string> &trace_paths, const std::string &data_path,
               const std::string &svg_path) {
  const auto series = collect_series(trace_paths);
  write_plot_data(series, data_path);
  if (!svg_path.empty()) write_plot_svg(series, svg_path);
}

}  // namespace lena
