#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "lcurve/types.hpp"

namespace lcurve {

/// Regressor of the logarithmic learning curve: ln(n) for metrics that grow
/// with training data, ln(1/n) for the false positive rate.
enum class CurveTransform { log_n, log_inverse_n };

constexpr CurveTransform transform_for(MetricKind kind) {
  return kind == MetricKind::FPR ? CurveTransform::log_inverse_n : CurveTransform::log_n;
}

/// value = intercept + slope * regressor(n)
struct LearningCurveModel {
  MetricKind metric_kind = MetricKind::ACC;
  double intercept = 0.0;
  double slope = 0.0;
  CurveTransform transform = CurveTransform::log_n;
  double adj_r_squared = 0.0;
  std::int64_t n_obs = 0;
  std::int64_t max_observed_n = 1000;  // largest training-set size behind the fit

  double regressor(double n) const;

  friend bool operator==(const LearningCurveModel&, const LearningCurveModel&) = default;
};

struct CurvePoint {
  std::int64_t num_tr_images = 1;
  double value = 0.0;
};

/// Closed-form least squares on ln(n) (ln(1/n) for FPR) with adjusted R^2 for
/// one regressor. Throws InputError for fewer than 3 points or bad sizes,
/// including a constant regressor.
LearningCurveModel fit_log_curve(std::span<const CurvePoint> points, MetricKind kind);

/// Curve value at n, clamped to [0, 1]. Throws InputError for n < 1.
double predict_metric(const LearningCurveModel& model, double n);

/// The published ordinary least squares curves for balanced designs, one per
/// metric in ACC, PRC, TPR, FPR order.
std::array<LearningCurveModel, 4> table1_presets();

const LearningCurveModel& preset_for(MetricKind kind);

}  // namespace lcurve
