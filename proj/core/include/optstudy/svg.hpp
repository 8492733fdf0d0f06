#pragma once

#include <string>
#include <utility>
#include <vector>

namespace optstudy {

struct ResponsePlot {
  std::vector<std::pair<double, double>> samples; // drawn as circles
  std::vector<std::pair<double, double>> curve;   // drawn as one polyline
  std::string x_label;
  std::string y_label;
  std::string title;
};

struct BarPlot {
  std::vector<std::pair<std::string, double>> bars; // one rect each
  std::string y_label;
  std::string title;
};

// Standalone SVG documents; output is a pure function of the input.
std::string render_response_svg(const ResponsePlot& plot);
std::string render_bars_svg(const BarPlot& plot);

} // namespace optstudy
