#include "lcurve/reference_data.hpp"

#include "lcurve/error.hpp"

namespace lcurve::reference {

const std::array<OlsCurveRow, 4>& published_ols_curves() {
  static const std::array<OlsCurveRow, 4> rows = {{
      {MetricKind::ACC, 0.85, 0.02, 0.57},
      {MetricKind::PRC, 0.34, 0.09, 0.54},
      {MetricKind::TPR, 0.32, 0.09, 0.52},
      {MetricKind::FPR, 0.09, 0.01, 0.34},
  }};
  return rows;
}

const std::vector<std::int64_t>& size_ladder() {
  static const std::vector<std::int64_t> v = {10, 20, 50, 150, 500, 1000};
  return v;
}

const std::vector<std::string>& datasets() {
  static const std::vector<std::string> v = {"AU", "SE", "WI"};
  return v;
}

const std::vector<std::string>& architectures() {
  static const std::vector<std::string> v = {"dnsNet121", "dnsNet161", "dnsNet201",
                                             "resNet152", "resNet18",  "resNet50"};
  return v;
}

const std::vector<std::string>& tunings() {
  static const std::vector<std::string> v = {"deep", "shallow"};
  return v;
}

const std::vector<std::string>& augmentations() {
  static const std::vector<std::string> v = {"aug1", "aug2", "aug3", "aug4"};
  return v;
}

const std::vector<std::string>& classes(const std::string& dataset) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"AU", {"Blank", "Cat", "Dog", "Fox", "Horse", "Kangaroo", "Lyrebird", "Others", "Pig"}},
      {"SE",
       {"Baboon", "Blank", "Buffalo", "Cheetah", "Elephant", "Hippopotamus", "Impala", "Others",
        "Zebra"}},
      {"WI",
       {"Bear", "Blank", "Elk", "Opossum", "Others", "Porcupine", "Raccoon", "SnowshoeHare",
        "Turkey"}},
  };
  const auto it = table.find(dataset);
  if (it == table.end()) throw InputError("unknown dataset '" + dataset + "'");
  return it->second;
}

const std::vector<double>& dataset_average(MetricKind metric, const std::string& dataset) {
  using Key = std::pair<MetricKind, std::string>;
  static const std::map<Key, std::vector<double>> table = {
      {{MetricKind::ACC, "AU"}, {0.89, 0.91, 0.94, 0.96, 0.99, 0.99}},
      {{MetricKind::ACC, "SE"}, {0.90, 0.93, 0.94, 0.95, 0.97, 0.97}},
      {{MetricKind::ACC, "WI"}, {0.87, 0.88, 0.92, 0.94, 0.96, 0.97}},
      {{MetricKind::PRC, "AU"}, {0.54, 0.61, 0.72, 0.84, 0.94, 0.97}},
      {{MetricKind::PRC, "SE"}, {0.55, 0.68, 0.75, 0.80, 0.85, 0.88}},
      {{MetricKind::PRC, "WI"}, {0.44, 0.50, 0.64, 0.74, 0.81, 0.87}},
      {{MetricKind::TPR, "AU"}, {0.52, 0.60, 0.71, 0.84, 0.94, 0.97}},
      {{MetricKind::TPR, "SE"}, {0.54, 0.67, 0.74, 0.79, 0.85, 0.88}},
      {{MetricKind::TPR, "WI"}, {0.42, 0.48, 0.63, 0.73, 0.81, 0.86}},
      {{MetricKind::FPR, "AU"}, {0.06, 0.05, 0.04, 0.02, 0.01, 0.00}},
      {{MetricKind::FPR, "SE"}, {0.06, 0.04, 0.03, 0.03, 0.02, 0.02}},
      {{MetricKind::FPR, "WI"}, {0.07, 0.06, 0.05, 0.03, 0.02, 0.02}},
  };
  const auto it = table.find({metric, dataset});
  if (it == table.end()) throw InputError("unknown dataset '" + dataset + "'");
  return it->second;
}

const PublishedGamEffects& published_gam_effects(MetricKind metric) {
  static const std::map<MetricKind, PublishedGamEffects> table = {
      {MetricKind::ACC,
       {3.322, 0.050, true, {{"SE", -0.452}, {"WI", -0.747}},
        {{"dnsNet161", 0.068}, {"dnsNet201", 0.044}, {"resNet152", -0.053},
         {"resNet18", -0.123}, {"resNet50", -0.059}},
        0.773, 0.660}},
      {MetricKind::PRC,
       {1.591, 0.045, true, {{"SE", -0.414}, {"WI", -0.845}},
        {{"dnsNet161", 0.095}, {"dnsNet201", 0.064}, {"resNet152", -0.072},
         {"resNet18", -0.178}, {"resNet50", -0.077}},
        0.689, 0.630}},
      {MetricKind::TPR,
       {1.460, 0.074, true, {{"SE", -0.388}, {"WI", -0.795}},
        {{"dnsNet161", 0.091}, {"dnsNet201", 0.063}, {"resNet152", -0.083},
         {"resNet18", -0.171}, {"resNet50", -0.093}},
        0.695, 0.611}},
      {MetricKind::FPR,
       {-3.797, 0.0, false, {{"SE", 0.333}, {"WI", 0.628}},
        {{"dnsNet161", -0.078}, {"dnsNet201", -0.045}, {"resNet152", 0.033},
         {"resNet18", 0.126}, {"resNet50", 0.025}},
        0.531, 0.390}},
  };
  return table.at(metric);
}

}  // namespace lcurve::reference
