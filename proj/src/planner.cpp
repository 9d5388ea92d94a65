#include "lcurve/planner.hpp"

#include <cmath>
#include <string>

#include "lcurve/error.hpp"

namespace lcurve {

namespace {

void validate(const PlanQuery& q) {
  if (!(q.target > 0.0 && q.target < 1.0)) throw InputError("target must lie in (0, 1)");
  if (q.search_ceiling < 1) throw InputError("search ceiling must be at least 1");
}

PlanResult unattainable(const PlanQuery& q, double value_at_ceiling) {
  PlanResult r;
  r.metric_kind = q.metric_kind;
  r.target = q.target;
  r.predicted_value = value_at_ceiling;
  return r;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::preset:
      return "preset";
    case Provenance::fitted_ols:
      return "fitted_ols";
    case Provenance::fitted_gam:
      return "fitted_gam";
  }
  return "unknown";
}

PlanResult required_sample_size(const LearningCurveModel& model, const PlanQuery& query) {
  validate(query);
  if (model.metric_kind != query.metric_kind) {
    throw InputError("query metric " + std::string(to_string(query.metric_kind)) +
                     " does not match the model metric " +
                     std::string(to_string(model.metric_kind)));
  }
  const auto value = [&](std::int64_t n) { return predict_metric(model, static_cast<double>(n)); };
  const std::int64_t ceiling = query.search_ceiling;

  std::int64_t n = 1;
  if (!query.meets(value(1))) {
    // coefficient on ln n; the FPR curve is written on ln(1/n)
    const double b = model.transform == CurveTransform::log_n ? model.slope : -model.slope;
    const double a = model.intercept;
    const bool improving = query.direction() == Direction::at_least ? b > 0.0 : b < 0.0;
    if (!improving) return unattainable(query, value(ceiling));
    const double log_n = (query.target - a) / b;
    if (log_n > std::log(static_cast<double>(ceiling)) + 1.0) {
      return unattainable(query, value(ceiling));
    }
    n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::exp(log_n))));
    while (n <= ceiling && !query.meets(value(n))) ++n;
    while (n > 1 && query.meets(value(n - 1))) --n;
    if (n > ceiling) return unattainable(query, value(ceiling));
  }

  PlanResult r;
  r.metric_kind = query.metric_kind;
  r.target = query.target;
  r.required_n = n;
  r.predicted_value = value(n);
  r.extrapolated = n > model.max_observed_n;
  return r;
}

PlanResult gam_required_sample_size(const AdditiveModel& model, const Cell& cell,
                                    const PlanQuery& query, Execution policy) {
  validate(query);
  if (model.response != query.metric_kind) {
    throw InputError("query metric " + std::string(to_string(query.metric_kind)) +
                     " does not match the model response " +
                     std::string(to_string(model.response)));
  }
  predict(model, cell);  // rejects unknown levels before the scan

  const auto count = static_cast<std::size_t>(query.search_ceiling);
  std::vector<double> values(count);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  for_each_index(policy, chunks, [&](std::size_t c) {
    Cell at = cell;
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      at.num_tr_images = static_cast<std::int64_t>(i + 1);
      values[i] = predict(model, at);
    }
  });

  if (!query.meets(values.back())) return unattainable(query, values.back());
  std::size_t first = count - 1;
  while (first > 0 && query.meets(values[first - 1])) --first;

  PlanResult r;
  r.metric_kind = query.metric_kind;
  r.target = query.target;
  r.required_n = static_cast<std::int64_t>(first + 1);
  r.predicted_value = values[first];
  r.extrapolated = *r.required_n > model.max_observed_n;
  return r;
}

PlanSource PlanSource::preset(MetricKind kind) {
  return {Provenance::preset, preset_for(kind)};
}

PlanReport plan_report(const std::map<MetricKind, double>& targets,
                       const std::map<MetricKind, PlanSource>& sources,
                       std::int64_t search_ceiling, Execution policy) {
  if (targets.empty()) throw InputError("at least one target is required");
  PlanReport report;
  bool any = false;
  for (const auto& [kind, target] : targets) {
    const auto it = sources.find(kind);
    if (it == sources.end()) {
      throw InputError("no model supplied for metric " + std::string(to_string(kind)));
    }
    const PlanQuery query{kind, target, search_ceiling};
    PlanRow row;
    row.provenance = it->second.provenance;
    if (const auto* ols = std::get_if<LearningCurveModel>(&it->second.model)) {
      row.result = required_sample_size(*ols, query);
    } else {
      const auto& gam = std::get<GamSource>(it->second.model);
      if (!gam.model) throw InputError("empty model for metric " + std::string(to_string(kind)));
      row.result = gam_required_sample_size(*gam.model, gam.cell, query, policy);
    }
    if (row.result.attainable() && (!any || *row.result.required_n > report.required_n)) {
      report.required_n = *row.result.required_n;
      report.binding_metric = kind;
      any = true;
    }
    report.rows.push_back(std::move(row));
  }
  if (!any) throw InfeasiblePlan("no feasible n: no target is attainable within the search ceiling");
  return report;
}

}  // namespace lcurve
