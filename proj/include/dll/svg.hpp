#pragma once

// Minimal standalone SVG emission: scatter plots and line charts on a fixed
// 800x600 viewport with labeled axis ticks. Textual output keeps plots
// diffable and testable by element counting.

#include <string>
#include <vector>

namespace dll {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void write_scatter_svg(const std::vector<SvgSeries>& clouds, const std::string& title,
                       const std::string& path);

// log_y plots log10(y); requires positive y values.
void write_lines_svg(const std::vector<SvgSeries>& series, const std::string& title,
                     const std::string& x_label, const std::string& y_label, bool log_y,
                     const std::string& path);

}  // namespace dll
