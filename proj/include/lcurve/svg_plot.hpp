#pragma once

#include <span>
#include <string>
#include <vector>

#include "lcurve/types.hpp"

namespace lcurve {

struct PlotSeries {
  std::string label;
  std::vector<double> x;  // training-set sizes
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> points;  // drawn as markers
  std::vector<PlotSeries> curves;  // drawn as polylines
};

/// Static SVG with a log-scaled x axis and a [0, 1] y axis.
std::string render_curve_svg(const PlotSpec& spec);

}  // namespace lcurve
