#include "lcurve/ols.hpp"

#include <algorithm>
#include <cmath>

#include "lcurve/error.hpp"
#include "lcurve/reference_data.hpp"

namespace lcurve {

double LearningCurveModel::regressor(double n) const {
  return transform == CurveTransform::log_n ? std::log(n) : -std::log(n);
}

LearningCurveModel fit_log_curve(std::span<const CurvePoint> points, MetricKind kind) {
  if (points.size() < 3) throw InputError("a log curve fit needs at least 3 points");

  LearningCurveModel model;
  model.metric_kind = kind;
  model.transform = transform_for(kind);
  model.n_obs = static_cast<std::int64_t>(points.size());
  model.max_observed_n = 0;

  const double n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& pt : points) {
    if (pt.num_tr_images < 1) throw InputError("num_tr_images must be a positive integer");
    if (!std::isfinite(pt.value)) throw InputError("curve values must be finite");
    model.max_observed_n = std::max(model.max_observed_n, pt.num_tr_images);
    mx += model.regressor(static_cast<double>(pt.num_tr_images));
    my += pt.value;
  }
  mx /= n;
  my /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : points) {
    const double dx = model.regressor(static_cast<double>(pt.num_tr_images)) - mx;
    const double dy = pt.value - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InputError("all training-set sizes are equal; the regressor is degenerate");

  model.slope = sxy / sxx;
  model.intercept = my - model.slope * mx;

  double sse = 0.0;
  for (const auto& pt : points) {
    const double r = pt.value - model.intercept -
                     model.slope * model.regressor(static_cast<double>(pt.num_tr_images));
    sse += r * r;
  }
  const double r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  model.adj_r_squared = 1.0 - (1.0 - r2) * (n - 1.0) / (n - 2.0);
  return model;
}

double predict_metric(const LearningCurveModel& model, double n) {
  if (!(n >= 1.0)) throw InputError("training-set size must be at least 1");
  return std::clamp(model.intercept + model.slope * model.regressor(n), 0.0, 1.0);
}

std::array<LearningCurveModel, 4> table1_presets() {
  std::array<LearningCurveModel, 4> out{};
  const auto& rows = reference::published_ols_curves();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i].metric_kind = rows[i].metric;
    out[i].intercept = rows[i].intercept;
    out[i].slope = rows[i].slope;
    out[i].transform = transform_for(rows[i].metric);
    out[i].adj_r_squared = rows[i].adj_r_squared;
  }
  return out;
}

const LearningCurveModel& preset_for(MetricKind kind) {
  static const std::array<LearningCurveModel, 4> presets = table1_presets();
  for (const auto& m : presets) {
    if (m.metric_kind == kind) return m;
  }
  throw InputError("no preset for metric");
}

}  // namespace lcurve
