#pragma once

#include <string>
#include <vector>

namespace impactflow {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal self-contained SVG line chart.  Output depends only on the inputs
/// (no timestamps, no external resources), so reruns are byte-identical.
void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace impactflow
