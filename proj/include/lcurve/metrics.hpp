#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcurve/types.hpp"

namespace lcurve {

/// One-vs-rest tallies for a single class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct PredictionRecord {
  std::string image_id;
  std::string true_class;
  std::string predicted_class;
  std::optional<std::string> location_id;
  /// Seconds since the Unix epoch, UTC.
  std::optional<std::int64_t> timestamp;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

/// Per-class one-vs-rest reduction of a multi-class prediction list.
/// Throws InputError for an empty record list or a label outside class_set.
std::map<std::string, ConfusionCounts> tally_confusion(
    std::span<const PredictionRecord> records, std::span<const std::string> class_set);

/// (tp + tn) / total. Throws InputError when the total is zero.
double accuracy(const ConfusionCounts& c);

/// tp / (tp + fp). An empty optional means the class was never predicted,
/// which is kept distinct from a precision of zero.
std::optional<double> precision(const ConfusionCounts& c);

/// tp / (tp + fn), the recall. Throws InputError when the class is absent
/// from the test set.
double true_positive_rate(const ConfusionCounts& c);

/// fp / (fp + tn). Throws InputError when there are no negatives.
double false_positive_rate(const ConfusionCounts& c);

/// All four ratios for one class.
struct ClassMetrics {
  std::string class_label;
  ConfusionCounts counts;
  double acc = 0.0;
  std::optional<double> prc;
  double tpr = 0.0;
  double fpr = 0.0;
};

std::vector<ClassMetrics> per_class_metrics(
    const std::map<std::string, ConfusionCounts>& tallies);

struct AggregateRow {
  std::vector<std::string> key;  // one entry per group_by field
  double mean = 0.0;
  std::optional<double> sd;  // n-1 estimator, present only when count >= 2
  std::int64_t count = 0;
};

/// Groups observations by the named covariate fields (in the order given).
/// Each group reports its mean and sample standard deviation with the count. Rows are
/// ordered by key. Throws InputError for an empty list or unknown field.
std::vector<AggregateRow> aggregate(std::span<const MetricObservation> observations,
                                    std::span<const std::string> group_by);

}  // namespace lcurve
