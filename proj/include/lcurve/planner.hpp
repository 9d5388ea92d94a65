#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "lcurve/gam.hpp"
#include "lcurve/ols.hpp"
#include "lcurve/parallel.hpp"

namespace lcurve {

enum class Direction { at_least, at_most };

constexpr Direction direction_for(MetricKind kind) {
  return higher_is_better(kind) ? Direction::at_least : Direction::at_most;
}

struct PlanQuery {
  MetricKind metric_kind = MetricKind::ACC;
  double target = 0.9;  // in (0, 1)
  std::int64_t search_ceiling = 100000;

  Direction direction() const { return direction_for(metric_kind); }
  bool meets(double value) const {
    return direction() == Direction::at_least ? value >= target : value <= target;
  }
};

struct PlanResult {
  MetricKind metric_kind = MetricKind::ACC;
  double target = 0.0;
  std::optional<std::int64_t> required_n;  // empty when unattainable
  double predicted_value = 0.0;            // at required_n, or at the ceiling when unattainable
  bool extrapolated = false;

  bool attainable() const { return required_n.has_value(); }
};

/// Closed-form inversion of a logarithmic curve followed by an integer
/// adjustment so that required_n is the smallest integer meeting the target.
PlanResult required_sample_size(const LearningCurveModel& model, const PlanQuery& query);

/// Scans n = 1..ceiling and returns the smallest n after which the prediction
/// meets the target all the way to the ceiling. Predictions are evaluated under
/// `policy`; the answer does not depend on it.
PlanResult gam_required_sample_size(const AdditiveModel& model, const Cell& cell,
                                    const PlanQuery& query,
                                    Execution policy = Execution::parallel);

enum class Provenance { preset, fitted_ols, fitted_gam };

std::string_view to_string(Provenance p);

struct GamSource {
  std::shared_ptr<const AdditiveModel> model;
  Cell cell;
};

struct PlanSource {
  Provenance provenance = Provenance::preset;
  std::variant<LearningCurveModel, GamSource> model;

  static PlanSource preset(MetricKind kind);
};

struct PlanRow {
  PlanResult result;
  Provenance provenance = Provenance::preset;
};

struct PlanReport {
  std::vector<PlanRow> rows;  // one per target, in metric order
  std::int64_t required_n = 0;
  MetricKind binding_metric = MetricKind::ACC;
};

/// One plan per target; the recommendation is the largest attainable
/// required_n. Throws InputError when a target has no source and
/// InfeasiblePlan when no target is attainable.
PlanReport plan_report(const std::map<MetricKind, double>& targets,
                       const std::map<MetricKind, PlanSource>& sources,
                       std::int64_t search_ceiling = 100000,
                       Execution policy = Execution::parallel);

}  // namespace lcurve
