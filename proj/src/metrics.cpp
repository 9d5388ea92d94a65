#include "lcurve/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "lcurve/error.hpp"

namespace lcurve {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::ACC:
      return "ACC";
    case MetricKind::PRC:
      return "PRC";
    case MetricKind::TPR:
      return "TPR";
    case MetricKind::FPR:
      return "FPR";
  }
  return "?";
}

MetricKind parse_metric_kind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (MetricKind kind : kAllMetrics) {
    if (upper == to_string(kind)) return kind;
  }
  throw InputError("unknown metric kind '" + std::string(text) +
                   "' (expected ACC, PRC, TPR or FPR)");
}

bool is_observation_field(std::string_view name) {
  return name == "metric" || name == "dataset" || name == "class" ||
         name == "architecture" || name == "tuning" || name == "augmentation" ||
         name == "num_tr_images";
}

std::string MetricObservation::field(std::string_view name) const {
  if (name == "metric") return std::string(to_string(metric_kind));
  if (name == "dataset") return dataset;
  if (name == "class") return class_label;
  if (name == "architecture") return architecture;
  if (name == "tuning") return tuning;
  if (name == "augmentation") return augmentation;
  if (name == "num_tr_images") return std::to_string(num_tr_images);
  throw InputError("unknown observation field '" + std::string(name) + "'");
}

std::map<std::string, ConfusionCounts> tally_confusion(
    std::span<const PredictionRecord> records, std::span<const std::string> class_set) {
  if (records.empty()) throw InputError("no prediction records to tally");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < class_set.size(); ++i) index.emplace(class_set[i], i);

  const auto lookup = [&](const std::string& label, const PredictionRecord& rec) {
    auto it = index.find(label);
    if (it == index.end()) {
      throw InputError("class label '" + label + "' of record '" + rec.image_id +
                       "' is not in the declared class set");
    }
    return it->second;
  };

  // Full K x K confusion matrix first; the one-vs-rest counts follow from its
  // row and column sums.
  const std::size_t k = class_set.size();
  std::vector<std::int64_t> matrix(k * k, 0);
  for (const auto& rec : records) {
    matrix[lookup(rec.true_class, rec) * k + lookup(rec.predicted_class, rec)] += 1;
  }

  const auto total = static_cast<std::int64_t>(records.size());
  std::map<std::string, ConfusionCounts> out;
  for (std::size_t c = 0; c < k; ++c) {
    std::int64_t row = 0;
    std::int64_t col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += matrix[c * k + j];
      col += matrix[j * k + c];
    }
    ConfusionCounts counts;
    counts.tp = matrix[c * k + c];
    counts.fn = row - counts.tp;
    counts.fp = col - counts.tp;
    counts.tn = total - counts.tp - counts.fn - counts.fp;
    out[class_set[c]] = counts;
  }
  return out;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() <= 0) throw InputError("accuracy undefined: confusion counts are all zero");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::optional<double> precision(const ConfusionCounts& c) {
  const std::int64_t predicted = c.tp + c.fp;
  if (predicted <= 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(predicted);
}

double true_positive_rate(const ConfusionCounts& c) {
  const std::int64_t positives = c.tp + c.fn;
  if (positives <= 0) throw InputError("true positive rate undefined: class absent from test set");
  return static_cast<double>(c.tp) / static_cast<double>(positives);
}

double false_positive_rate(const ConfusionCounts& c) {
  const std::int64_t negatives = c.fp + c.tn;
  if (negatives <= 0) throw InputError("false positive rate undefined: no negative images");
  return static_cast<double>(c.fp) / static_cast<double>(negatives);
}

std::vector<ClassMetrics> per_class_metrics(
    const std::map<std::string, ConfusionCounts>& tallies) {
  std::vector<ClassMetrics> rows;
  rows.reserve(tallies.size());
  for (const auto& [label, counts] : tallies) {
    ClassMetrics m;
    m.class_label = label;
    m.counts = counts;
    m.acc = accuracy(counts);
    m.prc = precision(counts);
    m.tpr = true_positive_rate(counts);
    m.fpr = false_positive_rate(counts);
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const MetricObservation> observations,
                                    std::span<const std::string> group_by) {
  if (observations.empty()) throw InputError("no observations to aggregate");
  for (const auto& name : group_by) {
    if (!is_observation_field(name)) {
      throw InputError("unknown group-by field '" + name + "'");
    }
  }

  // num_tr_images sorts numerically, everything else lexically.
  struct KeyLess {
    std::vector<bool> numeric;
    bool operator()(const std::vector<std::string>& a, const std::vector<std::string>& b) const {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (numeric[i]) return std::stoll(a[i]) < std::stoll(b[i]);
        return a[i] < b[i];
      }
      return false;
    }
  };
  KeyLess less;
  for (const auto& name : group_by) less.numeric.push_back(name == "num_tr_images");

  std::map<std::vector<std::string>, std::vector<double>, KeyLess> groups(less);
  for (const auto& obs : observations) {
    std::vector<std::string> key;
    key.reserve(group_by.size());
    for (const auto& name : group_by) key.push_back(obs.field(name));
    groups[std::move(key)].push_back(obs.value);
  }

  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (auto& [key, values] : groups) {
    AggregateRow row;
    row.key = key;
    row.count = static_cast<std::int64_t>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lcurve
