#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lcurve {

enum class MetricKind { ACC, PRC, TPR, FPR };

inline constexpr std::array<MetricKind, 4> kAllMetrics = {
    MetricKind::ACC, MetricKind::PRC, MetricKind::TPR, MetricKind::FPR};

std::string_view to_string(MetricKind kind);

/// Parses "ACC", "PRC", "TPR" or "FPR" (case-insensitive). Throws InputError.
MetricKind parse_metric_kind(std::string_view text);

/// True for metrics that improve upward (ACC, PRC, TPR); FPR improves downward.
constexpr bool higher_is_better(MetricKind kind) { return kind != MetricKind::FPR; }

/// One measured metric value together with the experimental covariates that
/// produced it.
struct MetricObservation {
  MetricKind metric_kind = MetricKind::ACC;
  double value = 0.0;
  std::string dataset;
  std::string class_label;
  std::int64_t num_tr_images = 1;
  std::string architecture;
  std::string tuning;
  std::string augmentation;

  /// Value of a categorical covariate by field name ("dataset", "class",
  /// "architecture", "tuning", "augmentation", "num_tr_images").
  std::string field(std::string_view name) const;

  friend bool operator==(const MetricObservation&, const MetricObservation&) = default;
};

/// Names accepted by MetricObservation::field.
bool is_observation_field(std::string_view name);

}  // namespace lcurve
