#pragma once

#include <string>
#include <vector>

namespace gcf {

struct SvgSeries {
  std::string label;
  std::vector<double> values;  // plotted against their index
};

/// A line plot with one polyline per series, shared axes and a legend.
std::string svg_line_plot(const std::string& title, const std::vector<SvgSeries>& series);

}  // namespace gcf
