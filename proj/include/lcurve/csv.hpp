#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcurve/metrics.hpp"
#include "lcurve/types.hpp"

namespace lcurve::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 records; quoted fields may span lines. CRLF and LF endings are accepted; blank lines are skipped.
std::vector<Row> parse(std::string_view text);

/// Header names mapped to column positions; throws InputError naming any
/// missing required column.
class Header {
 public:
  Header(const Row& row, std::span<const std::string_view> required);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t at(std::string_view name) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

/// Quotes a field when it needs quoting.
std::string escape(std::string_view field);
std::string join(std::span<const std::string> fields);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Seconds since the Unix epoch of an ISO-8601 date or date-time
/// (YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM]).
std::int64_t parse_iso8601(std::string_view text);

struct PredictionTable {
  std::vector<PredictionRecord> records;
  std::vector<std::string> classes;  // sorted
};

/// Columns image_id,true_class,predicted_class[,location_id,timestamp]. Labels
/// are checked against `class_list` when given, otherwise the observed set
/// becomes the class list.
PredictionTable parse_predictions(std::string_view text,
                                  const std::optional<std::vector<std::string>>& class_list = {});

/// Columns metric,value,dataset,class,num_tr_images,architecture,tuning,augmentation.
std::vector<MetricObservation> parse_observations(std::string_view text);

std::string write_observations(std::span<const MetricObservation> obs);

/// One image of the candidate list consumed by the study designer.
struct ImageRow {
  std::string class_label;
  std::string image_id;
  std::optional<std::string> location_id;
  std::optional<std::int64_t> timestamp;
};

/// Columns class,image_id[,timestamp,location_id].
std::vector<ImageRow> parse_image_list(std::string_view text);

}  // namespace lcurve::csv
