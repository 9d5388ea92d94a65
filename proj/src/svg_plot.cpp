#include "lcurve/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lcurve/error.hpp"

namespace lcurve {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_curve_svg(const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  for (const auto* group : {&spec.points, &spec.curves}) {
    for (const auto& s : *group) {
      if (s.x.size() != s.y.size()) throw InputError("plot series '" + s.label + "' has mismatched lengths");
      for (double x : s.x) {
        if (!(x > 0.0)) throw InputError("log axis needs positive x values");
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
      }
    }
  }
  if (!std::isfinite(xmin)) throw InputError("nothing to plot");
  double lo = std::floor(std::log10(xmin));
  double hi = std::ceil(std::log10(xmax));
  if (hi <= lo) hi = lo + 1;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (std::log10(x) - lo) / (hi - lo) * pw; };
  const auto py = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                    "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
                    fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         xml_escape(spec.title) + "</text>\n";

  for (double e = lo; e <= hi + 1e-9; e += 1.0) {
    for (int m = 1; m < 10; ++m) {
      const double v = m * std::pow(10.0, e);
      if (std::log10(v) > hi + 1e-9) break;
      const double x = px(v);
      svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
             fmt(kTop + ph) + "\" stroke=\"#" + (m == 1 ? std::string("ccc") : std::string("eee")) + "\"/>\n";
      if (m == 1) {
        svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
               std::to_string(static_cast<long long>(std::llround(v))) + "</text>\n";
      }
    }
  }
  for (int i = 0; i <= 10; i += 2) {
    const double y = py(i / 10.0);
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft + pw) + "\" y2=\"" +
           fmt(y) + "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
           fmt(i / 10.0) + "</text>\n";
  }
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(pw) + "\" height=\"" +
         fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 16) +
         "\" text-anchor=\"middle\">training images per class (log scale)</text>\n";
  svg += "<text transform=\"translate(18 " + fmt(kTop + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         xml_escape(spec.y_label) + "</text>\n";

  std::size_t colour = 0;
  double legend_y = kTop + 10;
  const auto legend = [&](const std::string& label, const char* c, bool line) {
    const double lx = kLeft + pw + 14;
    if (line) {
      svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(legend_y) + "\" x2=\"" + fmt(lx + 18) +
             "\" y2=\"" + fmt(legend_y) + "\" stroke=\"" + c + "\" stroke-width=\"2\"/>\n";
    } else {
      svg += "<circle cx=\"" + fmt(lx + 9) + "\" cy=\"" + fmt(legend_y) + "\" r=\"3\" fill=\"" + c + "\"/>\n";
    }
    svg += "<text x=\"" + fmt(lx + 24) + "\" y=\"" + fmt(legend_y + 4) + "\">" + xml_escape(label) + "</text>\n";
    legend_y += 18;
  };
  for (const auto& s : spec.points) {
    const char* c = kPalette[colour++ % std::size(kPalette)];
    svg += "<g fill=\"" + std::string(c) + "\" fill-opacity=\"0.35\">\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) + "\" r=\"2.5\"/>\n";
    }
    svg += "</g>\n";
    legend(s.label, c, false);
  }
  for (const auto& s : spec.curves) {
    const char* c = kPalette[colour++ % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) pts += ' ';
      pts += fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    legend(s.label, c, true);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace lcurve
