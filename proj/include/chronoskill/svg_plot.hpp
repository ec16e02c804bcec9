#pragma once

#include <string>
#include <vector>

namespace chronoskill {

// One curve: per-x mean eval return with a min/max band across the runs that
// share the label.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
  int runs = 0;
};

// Groups metrics CSVs by variant (taken from the run's directory path, else
// the file stem) and aggregates runs within a group pointwise.
std::vector<PlotSeries> load_plot_series(const std::vector<std::string>& csv_paths);

std::string render_learning_curves(const std::vector<PlotSeries>& series);

// x = env_steps, y = mean eval return, one series per variant, min/max band
// across seeds. Deterministic: the same CSVs render the same bytes.
void plot_curves(const std::vector<std::string>& csv_paths, const std::string& out_path);

}  // namespace chronoskill
