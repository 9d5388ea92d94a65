#include "lcurve/simulate.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <random>

#include "lcurve/beta_family.hpp"
#include "lcurve/error.hpp"
#include "lcurve/random.hpp"
#include "lcurve/reference_data.hpp"

namespace lcurve {

namespace {

constexpr double kPhiSim = 1000.0;
constexpr double kClassSd = 0.35;

double offset_of(const std::map<std::string, double>& table, const std::string& level) {
  const auto it = table.find(level);
  return it == table.end() ? 0.0 : it->second;
}

double expit(double x) { return inverse_logit(x).mu; }

/// Solves mean_i expit(L + offsets[i]) = target for L by bisection.
double solve_base(const std::vector<double>& offsets, double target) {
  double lo = -30.0;
  double hi = 30.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double o : offsets) mean += expit(mid + o);
    mean /= static_cast<double>(offsets.size());
    (mean < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GridConfig skeleton(std::uint64_t seed) {
  GridConfig c;
  c.datasets = reference::datasets();
  c.size_ladder = reference::size_ladder();
  c.architectures = reference::architectures();
  c.tunings = reference::tunings();
  c.augmentations = reference::augmentations();
  for (const auto& d : c.datasets) c.classes[d] = reference::classes(d);
  c.phi_sim = kPhiSim;
  c.seed = seed;
  return c;
}

MetricGenerator published_offsets(MetricKind kind) {
  const auto& eff = reference::published_gam_effects(kind);
  MetricGenerator g;
  g.metric_kind = kind;
  g.dataset_offsets = eff.dataset;
  g.dataset_offsets["AU"] = 0.0;
  g.architecture_offsets = eff.architecture;
  g.architecture_offsets["dnsNet121"] = 0.0;
  g.tuning_offsets = {{"deep", 0.0}, {"shallow", eff.tuning_shallow}};
  g.class_sd = kClassSd;
  return g;
}

/// Summed offsets of every combination within one dataset, plus `extra`.
std::vector<double> offset_combinations(const GridConfig& c, const MetricGenerator& g,
                                        const std::string& dataset, double extra) {
  std::vector<double> out;
  for (const auto& a : c.architectures) {
    for (const auto& t : c.tunings) {
      for (double co : c.class_offsets(g, dataset)) {
        out.push_back(extra + offset_of(g.architecture_offsets, a) +
                      offset_of(g.tuning_offsets, t) + co);
      }
    }
  }
  return out;
}

}  // namespace

double MetricGenerator::base(const std::string& dataset, std::int64_t n) const {
  if (!base_logit.empty()) {
    const auto d = base_logit.find(dataset);
    if (d == base_logit.end()) throw InputError("no base logit for dataset '" + dataset + "'");
    const auto v = d->second.find(n);
    if (v == d->second.end()) {
      throw InputError("no base logit for size " + std::to_string(n) + " in dataset '" + dataset + "'");
    }
    return v->second;
  }
  return intercept + offset_of(dataset_offsets, dataset) + slope * std::log(static_cast<double>(n));
}

double MetricGenerator::logit_mean(const std::string& dataset, std::int64_t n,
                                   const std::string& architecture, const std::string& tuning,
                                   double class_offset) const {
  return base(dataset, n) + offset_of(architecture_offsets, architecture) +
         offset_of(tuning_offsets, tuning) + class_offset;
}

std::size_t GridConfig::cell_count() const {
  return datasets.size() * size_ladder.size() * architectures.size() * tunings.size() *
         augmentations.size();
}

std::size_t GridConfig::observation_count() const {
  std::size_t per_dataset_cells =
      size_ladder.size() * architectures.size() * tunings.size() * augmentations.size();
  std::size_t total = 0;
  for (const auto& d : datasets) {
    const auto it = classes.find(d);
    total += per_dataset_cells * (it == classes.end() ? 0 : it->second.size());
  }
  return total * generators.size();
}

void GridConfig::validate() const {
  if (!(phi_sim > 0.0) || !std::isfinite(phi_sim)) throw InputError("phi_sim must be positive");
  if (datasets.empty() || size_ladder.empty() || architectures.empty() || tunings.empty() ||
      augmentations.empty() || generators.empty()) {
    throw InputError("every grid dimension needs at least one level");
  }
  for (auto n : size_ladder) {
    if (n < 1) throw InputError("ladder sizes must be positive");
  }
  for (const auto& d : datasets) {
    const auto it = classes.find(d);
    if (it == classes.end() || it->second.empty()) {
      throw InputError("dataset '" + d + "' has no classes");
    }
  }
  for (const auto& g : generators) {
    if (!(g.class_sd >= 0.0)) throw InputError("class_sd must be non-negative");
  }
}

std::vector<double> GridConfig::class_offsets(const MetricGenerator& gen,
                                              const std::string& dataset) const {
  const auto count = classes.at(dataset).size();
  const double sign = higher_is_better(gen.metric_kind) ? 1.0 : -1.0;
  std::vector<double> out(count);
  for (std::size_t c = 0; c < count; ++c) {
    const double p = (static_cast<double>(c) + 0.5) / static_cast<double>(count);
    out[c] = sign * gen.class_sd * -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
  }
  return out;
}

double calibration_target(MetricKind metric, const std::string& dataset, std::size_t size_index) {
  const double v = reference::dataset_average(metric, dataset).at(size_index);
  return std::clamp(v, kReportedZero, 1.0 - kReportedZero);
}

GridConfig GridConfig::log_linear(std::uint64_t seed) {
  GridConfig c = skeleton(seed);
  const std::size_t last = c.size_ladder.size() - 1;
  for (MetricKind kind : kAllMetrics) {
    MetricGenerator g = published_offsets(kind);
    std::vector<double> offsets;
    double lo_target = 0.0;
    double hi_target = 0.0;
    for (const auto& d : c.datasets) {
      const auto part = offset_combinations(c, g, d, offset_of(g.dataset_offsets, d));
      offsets.insert(offsets.end(), part.begin(), part.end());
      lo_target += calibration_target(kind, d, 0);
      hi_target += calibration_target(kind, d, last);
    }
    const auto nd = static_cast<double>(c.datasets.size());
    const double lo = solve_base(offsets, lo_target / nd);
    const double hi = solve_base(offsets, hi_target / nd);
    const double x0 = std::log(static_cast<double>(c.size_ladder.front()));
    const double x1 = std::log(static_cast<double>(c.size_ladder.back()));
    g.slope = (hi - lo) / (x1 - x0);
    g.intercept = lo - g.slope * x0;
    c.generators.push_back(std::move(g));
  }
  return c;
}

GridConfig GridConfig::per_size(std::uint64_t seed) {
  GridConfig c = skeleton(seed);
  for (MetricKind kind : kAllMetrics) {
    MetricGenerator g = published_offsets(kind);
    for (const auto& d : c.datasets) {
      const auto offsets = offset_combinations(c, g, d, 0.0);
      for (std::size_t s = 0; s < c.size_ladder.size(); ++s) {
        g.base_logit[d][c.size_ladder[s]] = solve_base(offsets, calibration_target(kind, d, s));
      }
    }
    c.generators.push_back(std::move(g));
  }
  return c;
}

std::vector<MetricObservation> simulate_grid(const GridConfig& config, Execution policy) {
  config.validate();

  const std::size_t ns = config.size_ladder.size();
  const std::size_t na = config.architectures.size();
  const std::size_t nt = config.tunings.size();
  const std::size_t ng = config.augmentations.size();
  const std::size_t cells = config.cell_count();

  // Output offset of every cell so each one writes a disjoint slice.
  std::vector<std::size_t> start(cells + 1, 0);
  std::vector<std::vector<std::vector<double>>> class_offsets(config.datasets.size());
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (const auto& gen : config.generators) {
      class_offsets[d].push_back(config.class_offsets(gen, config.datasets[d]));
    }
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t d = cell / (ns * na * nt * ng);
    start[cell + 1] =
        start[cell] + config.generators.size() * config.classes.at(config.datasets[d]).size();
  }

  std::vector<MetricObservation> out(start.back());
  for_each_index(policy, cells, [&](std::size_t cell) {
    std::size_t rem = cell;
    const std::size_t g = rem % ng;
    rem /= ng;
    const std::size_t t = rem % nt;
    rem /= nt;
    const std::size_t a = rem % na;
    rem /= na;
    const std::size_t s = rem % ns;
    const std::size_t d = rem / ns;

    const std::string& dataset = config.datasets[d];
    const std::int64_t n = config.size_ladder[s];
    const auto& labels = config.classes.at(dataset);
    std::mt19937_64 rng(stream_seed(config.seed, {d, s, a, t, g}));

    std::size_t slot = start[cell];
    for (std::size_t m = 0; m < config.generators.size(); ++m) {
      const MetricGenerator& gen = config.generators[m];
      for (std::size_t c = 0; c < labels.size(); ++c) {
        const MeanPair mean = inverse_logit(gen.logit_mean(
            dataset, n, config.architectures[a], config.tunings[t], class_offsets[d][m][c]));
        std::gamma_distribution<double> ga(mean.mu * config.phi_sim, 1.0);
        std::gamma_distribution<double> gb(mean.one_minus_mu * config.phi_sim, 1.0);
        double y = 0.0;
        do {
          const double x1 = ga(rng);
          const double x2 = gb(rng);
          y = x1 / (x1 + x2);
        } while (!(y > 0.0 && y < 1.0));

        MetricObservation& obs = out[slot++];
        obs.metric_kind = gen.metric_kind;
        obs.value = y;
        obs.dataset = dataset;
        obs.class_label = labels[c];
        obs.num_tr_images = n;
        obs.architecture = config.architectures[a];
        obs.tuning = config.tunings[t];
        obs.augmentation = config.augmentations[g];
      }
    }
  });
  return out;
}

}  // namespace lcurve
