#include "chronoskill/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "chronoskill/config.hpp"
#include "chronoskill/error.hpp"
#include "chronoskill/harness.hpp"
#include "chronoskill/text.hpp"

namespace chronoskill {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 920.0;
constexpr double kHeight = 540.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 24.0;
constexpr double kMarginBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct RunCurve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

RunCurve load_run_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines = split(text, '\n');
  if (lines.empty() || std::string_view(trim(lines[0])) != kMetricsCsvHeader) {
    // Report which canonical columns the header is missing.
    std::vector<std::string> have =
        lines.empty() ? std::vector<std::string>{} : split(std::string(trim(lines[0])), ',');
    std::string missing;
    for (const std::string& col : split(kMetricsCsvHeader, ',')) {
      if (std::find(have.begin(), have.end(), col) == have.end()) {
        if (!missing.empty()) missing += ",";
        missing += col;
      }
    }
    throw FormatError("plot: " + path + " does not match the metrics schema (missing columns: " +
                      (missing.empty() ? "none, column order differs" : missing) + ")");
  }

  RunCurve run;
  // Label by the variant directory if the path contains one (the layout used
  // by train/compare), otherwise by the file stem.
  run.label = fs::path(path).stem().string();
  for (fs::path part = fs::path(path).parent_path(); !part.empty();
       part = part.parent_path()) {
    const std::string name = part.filename().string();
    if (name == "vanilla" || name == "timeobs" || name == "multihead") {
      run.label = name;
      break;
    }
    if (part == part.parent_path()) break;
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string> cols = split(line, ',');
    if (cols.size() != 10) {
      throw FormatError("plot: " + path + " row " + std::to_string(i) + " has " +
                        std::to_string(cols.size()) + " columns, expected 10");
    }
    run.x.push_back(parse_double(cols[1], path + " env_steps"));
    run.y.push_back(parse_double(cols[2], path + " mean_return"));
  }
  if (run.x.empty()) throw FormatError("plot: " + path + " has no data rows");
  return run;
}

}  // namespace

std::vector<PlotSeries> load_plot_series(const std::vector<std::string>& csv_paths) {
  if (csv_paths.empty()) throw UsageError("plot: no input CSVs given");
  std::map<std::string, std::vector<RunCurve>> groups;
  for (const std::string& path : csv_paths) {
    RunCurve run = load_run_csv(path);
    groups[run.label].push_back(std::move(run));
  }

  std::vector<PlotSeries> series;
  for (auto& [label, runs] : groups) {
    for (const RunCurve& run : runs) {
      if (run.x != runs.front().x) {
        throw FormatError("plot: runs labelled '" + label +
                          "' have different env_steps columns and cannot be banded");
      }
    }
    PlotSeries s;
    s.label = label;
    s.runs = static_cast<int>(runs.size());
    s.x = runs.front().x;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double sum = 0.0, lo = runs.front().y[i], hi = lo;
      for (const RunCurve& run : runs) {
        sum += run.y[i];
        lo = std::min(lo, run.y[i]);
        hi = std::max(hi, run.y[i]);
      }
      s.mean.push_back(sum / static_cast<double>(runs.size()));
      s.lo.push_back(lo);
      s.hi.push_back(hi);
    }
    series.push_back(std::move(s));
  }
  return series;
}

std::string render_learning_curves(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw UsageError("plot: empty series list");

  double xmin = series[0].x.front(), xmax = xmin;
  double ymin = series[0].lo.front(), ymax = ymin;
  for (const PlotSeries& s : series) {
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      ymin = std::min(ymin, s.lo[i]);
      ymax = std::max(ymax, s.hi[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  const double ypad = (ymax - ymin) * 0.05;
  ymin -= ypad > 0.0 ? ypad : 0.5;
  ymax += ypad > 0.0 ? ypad : 0.5;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // grid and tick labels
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / ticks;
    const double fy = ymin + (ymax - ymin) * i / ticks;
    svg += "<line x1=\"" + num(sx(fx)) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" + num(sx(fx)) +
           "\" y2=\"" + num(kMarginTop + plot_h) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(sy(fy)) + "\" x2=\"" +
           num(kMarginLeft + plot_w) + "\" y2=\"" + num(sy(fy)) +
           "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(kMarginTop + plot_h + 20.0) +
           "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">" + num(fx) + "</text>\n";
    svg += "<text x=\"" + num(kMarginLeft - 8.0) + "\" y=\"" + num(sy(fy) + 4.0) +
           "\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">" + num(fy) + "</text>\n";
  }
  svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + num(kMarginLeft + plot_w / 2.0) + "\" y=\"" + num(kHeight - 14.0) +
         "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#000000\">environment steps</text>\n";
  svg += "<text x=\"18\" y=\"" + num(kMarginTop + plot_h / 2.0) +
         "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#000000\" transform=\"rotate(-90 18 " +
         num(kMarginTop + plot_h / 2.0) + ")\">mean eval return</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (s.runs > 1) {
      std::string pts;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        pts += num(sx(s.x[i])) + "," + num(sy(s.hi[i])) + " ";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        pts += num(sx(s.x[i])) + "," + num(sy(s.lo[i])) + " ";
      }
      svg += "<polygon points=\"" + pts + "\" fill=\"" + color +
             "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      pts += num(sx(s.x[i])) + "," + num(sy(s.mean[i])) + " ";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";

    const double ly = kMarginTop + 18.0 + 20.0 * static_cast<double>(si);
    svg += "<line x1=\"" + num(kMarginLeft + 12.0) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kMarginLeft + 40.0) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kMarginLeft + 46.0) + "\" y=\"" + num(ly + 4.0) +
           "\" font-size=\"13\" fill=\"#000000\">" + s.label + " (" + std::to_string(s.runs) +
           (s.runs == 1 ? " run)" : " runs)") + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void plot_curves(const std::vector<std::string>& csv_paths, const std::string& out_path) {
  const std::vector<PlotSeries> series = load_plot_series(csv_paths);
  write_text_file(out_path, render_learning_curves(series));
}

}  // namespace chronoskill
