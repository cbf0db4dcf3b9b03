#pragma once

#include "fsi/report.hpp"

#include <string>
#include <vector>

namespace fsi {

struct PlotSeries {
  std::string name;
  std::string css_class = "line";  // written as the polyline class
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  double width = 1.5;
  bool dashed = false;
};

struct PlotAxes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained SVG; identical input gives identical bytes. Non-positive
/// values are dropped on log axes.
std::string svg_line_plot(const PlotAxes& axes, const std::vector<PlotSeries>& series);

struct BarGroup {
  std::string name;
  std::vector<double> values;  // one per category
  std::string color;
};

std::string svg_bar_chart(const PlotAxes& axes, const std::vector<std::string>& categories,
                          const std::vector<BarGroup>& groups);

/// Reads a CSV with a header line of names and numeric rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::size_t c) const;
};

CsvTable read_csv(const std::string& path);

/// Writes the plots whose inputs exist in `dir`:
///   trace_decay.svg      from trace_decay.csv and the singular fit scalars
///   gain_levels.svg      from the gain study table
///   cost_convergence.svg from cost_convergence.csv
///   lp_norms.svg         from the L_p table (skipped for an empty p list)
/// Missing inputs are noted in the report. Returns the files written.
std::vector<std::string> emit_plots(DiagnosticsReport& report, const std::string& dir);

}  // namespace fsi
