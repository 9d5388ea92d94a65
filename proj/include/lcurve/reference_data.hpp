#pragma once

// Published numbers behind the presets and the simulator calibration. All values are data; nothing here is estimated.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lcurve/types.hpp"

namespace lcurve::reference {

struct OlsCurveRow {
  MetricKind metric;
  double intercept;
  double slope;
  double adj_r_squared;
};

/// Logarithmic learning curves for balanced designs, ACC, PRC, TPR, FPR order.
const std::array<OlsCurveRow, 4>& published_ols_curves();

/// Training-set size ladder {10, 20, 50, 150, 500, 1000}.
const std::vector<std::int64_t>& size_ladder();

const std::vector<std::string>& datasets();
const std::vector<std::string>& architectures();
const std::vector<std::string>& tunings();
const std::vector<std::string>& augmentations();
/// The nine classes of each dataset.
const std::vector<std::string>& classes(const std::string& dataset);

/// Class-averaged metric means per dataset, one value per ladder size.
/// Reported to two decimals, so a mean of 0.00 stands for anything below 0.005.
const std::vector<double>& dataset_average(MetricKind metric, const std::string& dataset);

/// Logit-scale effects of the published additive models. A metric without a
/// tuning effect reports 0 for shallow tuning.
struct PublishedGamEffects {
  double intercept;
  double tuning_shallow;
  bool has_tuning;
  std::map<std::string, double> dataset;       // relative to AU
  std::map<std::string, double> architecture;  // relative to dnsNet121
  double deviance_explained;
  double adj_r_squared;
};

const PublishedGamEffects& published_gam_effects(MetricKind metric);

}  // namespace lcurve::reference
