#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lcurve/parallel.hpp"
#include "lcurve/types.hpp"

namespace lcurve {

/// Logit-scale mean structure of one simulated metric:
///   logit mu = base(dataset, n) + architecture + tuning + class offset
/// where base is intercept + dataset offset + slope * ln n unless a
/// per-(dataset, size) table is given.
struct MetricGenerator {
  MetricKind metric_kind = MetricKind::ACC;
  double intercept = 0.0;
  double slope = 0.0;  // coefficient on ln n, negative for FPR
  std::map<std::string, double> dataset_offsets;
  std::map<std::string, double> architecture_offsets;
  std::map<std::string, double> tuning_offsets;
  double class_sd = 0.0;
  std::map<std::string, std::map<std::int64_t, double>> base_logit;

  double base(const std::string& dataset, std::int64_t n) const;
  double logit_mean(const std::string& dataset, std::int64_t n, const std::string& architecture,
                    const std::string& tuning, double class_offset) const;
};

struct GridConfig {
  std::vector<std::string> datasets;
  std::vector<std::int64_t> size_ladder;
  std::vector<std::string> architectures;
  std::vector<std::string> tunings;
  std::vector<std::string> augmentations;
  std::map<std::string, std::vector<std::string>> classes;  // per dataset
  std::vector<MetricGenerator> generators;
  double phi_sim = 1000.0;
  std::uint64_t seed = 0;

  std::size_t cell_count() const;
  std::size_t observation_count() const;
  /// Throws InputError for a non-positive precision or an empty dimension.
  void validate() const;

  /// Deterministic zero-mean class offsets class_sd * Phi^-1((c + 0.5) / C),
  /// sign-flipped for metrics that improve downward.
  std::vector<double> class_offsets(const MetricGenerator& gen, const std::string& dataset) const;

  /// Log-linear truth: per metric a two-point calibration to the
  /// cross-dataset averages at the smallest and largest ladder size.
  static GridConfig log_linear(std::uint64_t seed);
  /// Per-(dataset, size) truth matching the dataset averages at every
  /// ladder size.
  static GridConfig per_size(std::uint64_t seed);
};

/// Stand-in for the reported 0.00 averages, half the rounding interval.
inline constexpr double kReportedZero = 0.0025;

/// The target average of the simulated grids for (metric, dataset, size).
double calibration_target(MetricKind metric, const std::string& dataset, std::size_t size_index);

/// Draws one Beta(mu*phi, (1-mu)*phi) value per (cell, generator, class).
/// Cells are ordered dataset, size, architecture, tuning, augmentation. Each
/// cell draws from its own stream seeded by the master seed and the cell's
/// coordinates, so the output does not depend on `policy`.
std::vector<MetricObservation> simulate_grid(const GridConfig& config,
                                             Execution policy = Execution::parallel);

}  // namespace lcurve
