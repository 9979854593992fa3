#pragma once

#include <string>
#include <vector>

#include "ska/metrics.hpp"

namespace ska::cli {

struct Series {
  std::string label;
  std::vector<double> x, y;    // NaN y values break the line
  std::vector<std::size_t> marks;  // indices drawn as dots
};

struct Chart {
  std::string title, x_label, y_label;
  std::vector<Series> series;
};

std::string render_svg(const Chart& chart);

struct NamedChart {
  std::string file;  // e.g. "entropy_vs_step.svg"
  Chart chart;
};

// Six line charts for one trajectory, one per output file.
std::vector<NamedChart> trace_charts(const TrajectoryTrace& trace);

}  // namespace ska::cli
