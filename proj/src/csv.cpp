#include "lcurve/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "lcurve/error.hpp"

namespace lcurve::csv {

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& msg) {
  throw InputError("line " + std::to_string(line) + ": " + msg);
}

bool blank(const Row& row) { return row.fields.size() == 1 && row.fields[0].empty(); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<Row> records(std::string_view text) {
  auto rows = parse(text);
  std::erase_if(rows, blank);
  if (rows.empty()) throw InputError("empty file");
  return rows;
}

std::int64_t parse_int(std::string_view s, std::size_t line, std::string_view what) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail_at(line, std::string(what) + " '" + std::string(s) + "' is not an integer");
  }
  return v;
}

double parse_real(std::string_view s, std::size_t line, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail_at(line, std::string(what) + " '" + std::string(s) + "' is not a number");
  }
  return v;
}

int digits(std::string_view s, std::size_t pos, std::size_t count, std::string_view text) {
  if (pos + count > s.size()) throw InputError("malformed timestamp '" + std::string(text) + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') throw InputError("malformed timestamp '" + std::string(text) + "'");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    Row row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool field_started_quoted = false;
    bool end_of_record = false;
    while (i < n && !end_of_record) {
      const char c = text[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field += '"';
            i += 2;
          } else {
            quoted = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++i;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || field_started_quoted) fail_at(line, "unexpected quote inside a field");
          quoted = true;
          field_started_quoted = true;
          ++i;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          field_started_quoted = false;
          ++i;
          break;
        case '\r':
          if (i + 1 < n && text[i + 1] == '\n') ++i;
          [[fallthrough]];
        case '\n':
          end_of_record = true;
          ++line;
          ++i;
          break;
        default:
          if (field_started_quoted) fail_at(line, "characters after a closing quote");
          field += c;
          ++i;
      }
    }
    if (quoted) fail_at(row.line, "unterminated quoted field");
    if (row.fields.empty() && field.empty() && !field_started_quoted) continue;
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Header::Header(const Row& row, std::span<const std::string_view> required) {
  for (const auto& f : row.fields) names_.emplace_back(trim(f));
  for (auto name : required) {
    if (!find(name)) throw InputError("missing column '" + std::string(name) + "'");
  }
}

std::optional<std::size_t> Header::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Header::at(std::string_view name) const {
  if (auto idx = find(name)) return *idx;
  throw InputError("missing column '" + std::string(name) + "'");
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += escape(fields[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::int64_t parse_iso8601(std::string_view text) {
  const std::string_view s = trim(text);
  const int year = digits(s, 0, 4, text);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
    throw InputError("malformed timestamp '" + std::string(text) + "'");
  }
  const int month = digits(s, 5, 2, text);
  const int day = digits(s, 8, 2, text);
  constexpr int kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month < 1 || month > 12 || day < 1 || day > kDays[month - 1] || (month == 2 && day == 29 && !leap)) {
    throw InputError("timestamp '" + std::string(text) + "' has an invalid date");
  }
  std::int64_t seconds = days_from_civil(year, static_cast<unsigned>(month),
                                         static_cast<unsigned>(day)) * 86400;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const int hh = digits(s, pos + 1, 2, text);
    if (pos + 3 >= s.size() || s[pos + 3] != ':') {
      throw InputError("malformed timestamp '" + std::string(text) + "'");
    }
    const int mm = digits(s, pos + 4, 2, text);
    int ss = 0;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      ss = digits(s, pos + 1, 2, text);
      pos += 3;
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) {
      throw InputError("timestamp '" + std::string(text) + "' has an invalid time");
    }
    seconds += hh * 3600 + mm * 60 + ss;
    if (pos < s.size()) {
      if (s[pos] == 'Z') {
        ++pos;
      } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        const int oh = digits(s, pos + 1, 2, text);
        std::size_t mpos = pos + 3;
        if (mpos < s.size() && s[mpos] == ':') ++mpos;
        const int om = digits(s, mpos, 2, text);
        seconds -= sign * (oh * 3600 + om * 60);
        pos = mpos + 2;
      }
    }
  }
  if (pos != s.size()) throw InputError("malformed timestamp '" + std::string(text) + "'");
  return seconds;
}

PredictionTable parse_predictions(std::string_view text,
                                  const std::optional<std::vector<std::string>>& class_list) {
  const auto rows = records(text);
  static constexpr std::string_view required[] = {"image_id", "true_class", "predicted_class"};
  const Header header(rows.front(), required);
  const auto c_id = header.at("image_id");
  const auto c_true = header.at("true_class");
  const auto c_pred = header.at("predicted_class");
  const auto c_loc = header.find("location_id");
  const auto c_time = header.find("timestamp");

  PredictionTable table;
  std::set<std::string> observed;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.fields.size() != header.size()) {
      fail_at(row.line, "expected " + std::to_string(header.size()) + " columns, found " +
                            std::to_string(row.fields.size()));
    }
    PredictionRecord rec;
    rec.image_id = std::string(trim(row.fields[c_id]));
    rec.true_class = std::string(trim(row.fields[c_true]));
    rec.predicted_class = std::string(trim(row.fields[c_pred]));
    if (rec.image_id.empty() || rec.true_class.empty() || rec.predicted_class.empty()) {
      fail_at(row.line, "image_id, true_class and predicted_class must be non-empty");
    }
    if (c_loc && !trim(row.fields[*c_loc]).empty()) {
      rec.location_id = std::string(trim(row.fields[*c_loc]));
    }
    if (c_time && !trim(row.fields[*c_time]).empty()) {
      try {
        rec.timestamp = parse_iso8601(row.fields[*c_time]);
      } catch (const InputError& e) {
        fail_at(row.line, e.what());
      }
    }
    observed.insert(rec.true_class);
    observed.insert(rec.predicted_class);
    table.records.push_back(std::move(rec));
  }
  if (table.records.empty()) throw InputError("no records");

  if (class_list) {
    const std::set<std::string> allowed(class_list->begin(), class_list->end());
    for (std::size_t r = 0; r < table.records.size(); ++r) {
      for (const auto* label : {&table.records[r].true_class, &table.records[r].predicted_class}) {
        if (!allowed.count(*label)) fail_at(rows[r + 1].line, "unknown class label '" + *label + "'");
      }
    }
    table.classes.assign(allowed.begin(), allowed.end());
  } else {
    table.classes.assign(observed.begin(), observed.end());
  }
  return table;
}

std::vector<MetricObservation> parse_observations(std::string_view text) {
  const auto rows = records(text);
  static constexpr std::string_view required[] = {
      "metric", "value", "dataset", "class", "num_tr_images", "architecture", "tuning",
      "augmentation"};
  const Header header(rows.front(), required);
  std::vector<std::size_t> col;
  for (auto name : required) col.push_back(header.at(name));

  std::vector<MetricObservation> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.fields.size() != header.size()) {
      fail_at(row.line, "expected " + std::to_string(header.size()) + " columns, found " +
                            std::to_string(row.fields.size()));
    }
    const auto field = [&](std::size_t i) { return std::string(trim(row.fields[col[i]])); };
    MetricObservation obs;
    try {
      obs.metric_kind = parse_metric_kind(field(0));
    } catch (const InputError& e) {
      fail_at(row.line, e.what());
    }
    obs.value = parse_real(row.fields[col[1]], row.line, "value");
    if (obs.value < 0.0 || obs.value > 1.0) {
      fail_at(row.line, "value " + field(1) + " is outside [0, 1]");
    }
    obs.dataset = field(2);
    obs.class_label = field(3);
    obs.num_tr_images = parse_int(row.fields[col[4]], row.line, "num_tr_images");
    if (obs.num_tr_images < 1) fail_at(row.line, "num_tr_images must be a positive integer");
    obs.architecture = field(5);
    obs.tuning = field(6);
    obs.augmentation = field(7);
    out.push_back(std::move(obs));
  }
  if (out.empty()) throw InputError("no records");
  return out;
}

std::string write_observations(std::span<const MetricObservation> obs) {
  std::string out = "metric,value,dataset,class,num_tr_images,architecture,tuning,augmentation\n";
  for (const auto& o : obs) {
    const std::string fields[] = {std::string(to_string(o.metric_kind)), format_double(o.value),
                                  o.dataset, o.class_label, std::to_string(o.num_tr_images),
                                  o.architecture, o.tuning, o.augmentation};
    out += join(fields);
    out += '\n';
  }
  return out;
}

std::vector<ImageRow> parse_image_list(std::string_view text) {
  const auto rows = records(text);
  static constexpr std::string_view required[] = {"class", "image_id"};
  const Header header(rows.front(), required);
  const auto c_class = header.at("class");
  const auto c_id = header.at("image_id");
  const auto c_loc = header.find("location_id");
  const auto c_time = header.find("timestamp");

  std::vector<ImageRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.fields.size() != header.size()) {
      fail_at(row.line, "expected " + std::to_string(header.size()) + " columns, found " +
                            std::to_string(row.fields.size()));
    }
    ImageRow img;
    img.class_label = std::string(trim(row.fields[c_class]));
    img.image_id = std::string(trim(row.fields[c_id]));
    if (img.class_label.empty() || img.image_id.empty()) {
      fail_at(row.line, "class and image_id must be non-empty");
    }
    if (c_loc && !trim(row.fields[*c_loc]).empty()) {
      img.location_id = std::string(trim(row.fields[*c_loc]));
    }
    if (c_time && !trim(row.fields[*c_time]).empty()) {
      try {
        img.timestamp = parse_iso8601(row.fields[*c_time]);
      } catch (const InputError& e) {
        fail_at(row.line, e.what());
      }
    }
    out.push_back(std::move(img));
  }
  if (out.empty()) throw InputError("no records");
  return out;
}

}  // namespace lcurve::csv
