#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "lcurve/error.hpp"
#include "lcurve/random.hpp"
#include "lcurve/reference_data.hpp"
#include "lcurve/simulate.hpp"

using namespace lcurve;

namespace {

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Average expected mean over the architecture x tuning x class combinations of a dataset.
double expected_cell_mean(const GridConfig& c, const MetricGenerator& g, const std::string& d,
                          std::int64_t n) {
  double s = 0;
  int count = 0;
  for (const auto& a : c.architectures) {
    for (const auto& t : c.tunings) {
      for (double co : c.class_offsets(g, d)) {
        s += expit(g.logit_mean(d, n, a, t, co));
        ++count;
      }
    }
  }
  return s / count;
}

}  // namespace

TEST(Random, StreamSeedsDiffer) {
  EXPECT_NE(stream_seed(1, {0, 0, 0, 0, 0}), stream_seed(1, {0, 0, 0, 0, 1}));
  EXPECT_NE(stream_seed(1, {0}), stream_seed(2, {0}));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(GridConfig, DefaultGridShape) {
  const auto c = GridConfig::log_linear(1);
  EXPECT_EQ(c.cell_count(), 864u);
  EXPECT_EQ(c.observation_count(), 864u * 9u * 4u);
  EXPECT_EQ(simulate_grid(c).size(), 31104u);
}

TEST(GridConfig, ClassOffsetsAreSymmetricQuantiles) {
  const auto c = GridConfig::log_linear(1);
  for (const auto& g : c.generators) {
    const auto off = c.class_offsets(g, "AU");
    ASSERT_EQ(off.size(), 9u);
    double sum = 0;
    for (double o : off) sum += o;
    EXPECT_NEAR(sum, 0.0, 1e-12);
    EXPECT_NEAR(off[4], 0.0, 1e-15);
    // Phi^-1(8.5/9) for the most extreme class
    const double z = 1.5932188;
    const double sign = higher_is_better(g.metric_kind) ? 1.0 : -1.0;
    EXPECT_NEAR(off[8], sign * g.class_sd * z, 1e-6);
  }
}

TEST(GridConfig, PerSizeCalibrationMatchesTargets) {
  const auto c = GridConfig::per_size(1);
  for (const auto& g : c.generators) {
    for (const auto& d : c.datasets) {
      for (std::size_t s = 0; s < c.size_ladder.size(); ++s) {
        const double want = std::clamp(reference::dataset_average(g.metric_kind, d)[s], kReportedZero,
                                       1 - kReportedZero);
        EXPECT_NEAR(expected_cell_mean(c, g, d, c.size_ladder[s]), want, 1e-9);
      }
    }
  }
}

TEST(GridConfig, LogLinearMatchesEndpointAverages) {
  const auto c = GridConfig::log_linear(1);
  for (const auto& g : c.generators) {
    for (std::size_t s : {std::size_t{0}, c.size_ladder.size() - 1}) {
      double got = 0, want = 0;
      for (const auto& d : c.datasets) {
        got += expected_cell_mean(c, g, d, c.size_ladder[s]) / 3.0;
        want += calibration_target(g.metric_kind, d, s) / 3.0;
      }
      EXPECT_NEAR(got, want, 1e-9) << to_string(g.metric_kind);
    }
  }
}

TEST(SimulateGrid, ValuesInsideUnitInterval) {
  for (const auto& o : simulate_grid(GridConfig::per_size(3))) {
    ASSERT_GT(o.value, 0.0);
    ASSERT_LT(o.value, 1.0);
  }
}

TEST(SimulateGrid, SerialAndParallelBitIdentical) {
  const auto c = GridConfig::log_linear(77);
  const auto a = simulate_grid(c, Execution::serial);
  const auto b = simulate_grid(c, Execution::parallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
}

TEST(SimulateGrid, SeedControlsDraws) {
  const auto a = simulate_grid(GridConfig::log_linear(5));
  const auto b = simulate_grid(GridConfig::log_linear(5));
  const auto c = simulate_grid(GridConfig::log_linear(6));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(SimulateGrid, ZeroSlopeGivesSizeIndependentMeans) {
  auto c = GridConfig::log_linear(9);
  for (auto& g : c.generators) g.slope = 0.0;
  c.phi_sim = 1e6;
  std::map<std::int64_t, double> mean;
  std::map<std::int64_t, int> count;
  for (const auto& o : simulate_grid(c)) {
    if (o.metric_kind != MetricKind::ACC) continue;
    mean[o.num_tr_images] += o.value;
    ++count[o.num_tr_images];
  }
  const double ref = mean.begin()->second / count.begin()->second;
  for (const auto& [n, s] : mean) EXPECT_NEAR(s / count[n], ref, 2e-3) << n;
}

TEST(SimulateGrid, SampleMeansTrackExpectedMeans) {
  auto c = GridConfig::per_size(10);
  std::map<std::pair<std::string, std::int64_t>, double> sum;
  std::map<std::pair<std::string, std::int64_t>, int> cnt;
  for (const auto& o : simulate_grid(c)) {
    if (o.metric_kind != MetricKind::ACC) continue;
    sum[{o.dataset, o.num_tr_images}] += o.value;
    ++cnt[{o.dataset, o.num_tr_images}];
  }
  for (const auto& [key, s] : sum) {
    const double target = calibration_target(MetricKind::ACC, key.first,
                                             static_cast<std::size_t>(std::find(c.size_ladder.begin(), c.size_ladder.end(), key.second) -
                                                                      c.size_ladder.begin()));
    EXPECT_NEAR(s / cnt[key], target, 0.01);
  }
}

TEST(SimulateGrid, Rejections) {
  auto c = GridConfig::log_linear(1);
  c.phi_sim = 0;
  EXPECT_THROW(simulate_grid(c), InputError);
  c = GridConfig::log_linear(1);
  c.classes.erase("AU");
  EXPECT_THROW(simulate_grid(c), InputError);
}
