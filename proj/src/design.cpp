#include "lcurve/design.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "lcurve/error.hpp"
#include "lcurve/random.hpp"

namespace lcurve {

std::vector<std::size_t> equal_space_indices(std::size_t m, std::size_t k) {
  if (k > m) {
    throw InputError("cannot select " + std::to_string(k) + " of " + std::to_string(m) +
                     " images (shortfall " + std::to_string(k - m) + ")");
  }
  std::vector<std::size_t> out(k);
  const std::size_t stride = k ? m / k : 0;
  const std::size_t extra = k ? m % k : 0;
  for (std::size_t i = 0; i < k; ++i) out[i] = i * stride + (i * extra) / k;
  return out;
}

std::vector<std::string> equal_space_select(std::span<const std::string> ordered_ids,
                                            std::size_t k) {
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t idx : equal_space_indices(ordered_ids.size(), k)) out.push_back(ordered_ids[idx]);
  return out;
}

SamplingManifest split_design(std::span<const ClassPool> pools, std::int64_t test_size,
                              std::vector<std::int64_t> size_ladder, std::uint64_t seed,
                              SubsetMode mode) {
  if (pools.empty()) throw InputError("no classes to split");
  if (test_size < 1) throw InputError("test size must be positive");
  if (size_ladder.empty()) throw InputError("size ladder is empty");
  std::sort(size_ladder.begin(), size_ladder.end());
  if (size_ladder.front() < 1) throw InputError("ladder sizes must be positive");
  if (std::adjacent_find(size_ladder.begin(), size_ladder.end()) != size_ladder.end()) {
    throw InputError("ladder sizes must be distinct");
  }
  const std::int64_t need = test_size + size_ladder.back();

  SamplingManifest manifest;
  manifest.seed = seed;
  manifest.size_ladder = size_ladder;
  manifest.test_size = test_size;
  manifest.mode = mode;

  std::set<std::string> seen_classes;
  for (const auto& pool : pools) {
    if (!seen_classes.insert(pool.class_label).second) {
      throw InputError("class '" + pool.class_label + "' appears twice");
    }
    const auto have = static_cast<std::int64_t>(pool.ids.size());
    if (have < need) {
      throw InputError("class '" + pool.class_label + "' has " + std::to_string(have) +
                       " images but needs " + std::to_string(need) + " (shortfall " +
                       std::to_string(need - have) + ")");
    }
    if (std::set<std::string>(pool.ids.begin(), pool.ids.end()).size() != pool.ids.size()) {
      throw InputError("class '" + pool.class_label + "' has duplicate image ids");
    }

    std::mt19937_64 rng(stream_seed(seed, fnv1a(pool.class_label)));
    std::vector<std::string> order = pool.ids;
    std::shuffle(order.begin(), order.end(), rng);

    ClassSplit split;
    split.class_label = pool.class_label;
    split.pool = pool.ids;
    split.test_ids.assign(order.begin(), order.begin() + test_size);
    std::vector<std::string> rest(order.begin() + test_size, order.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::int64_t size : size_ladder) {
      std::vector<std::string> subset;
      if (mode == SubsetMode::nested) {
        subset.assign(rest.begin(), rest.begin() + size);
      } else {
        std::sample(rest.begin(), rest.end(), std::back_inserter(subset), size, rng);
      }
      split.train_subsets.emplace(size, std::move(subset));
    }
    manifest.classes.push_back(std::move(split));
  }
  return manifest;
}

CoverageReport validate_location_coverage(const SamplingManifest& manifest,
                                          const std::map<std::string, std::string>& location_of,
                                          std::size_t min_locations) {
  CoverageReport report;
  for (const auto& cls : manifest.classes) {
    const std::set<std::string> test(cls.test_ids.begin(), cls.test_ids.end());
    std::set<std::string> train_locs;
    std::set<std::string> test_locs;
    for (const auto& id : cls.pool) {
      const auto it = location_of.find(id);
      if (it == location_of.end() || it->second.empty()) {
        report.reason = "image '" + id + "' of class '" + cls.class_label + "' has no location";
        report.violations.clear();
        return report;
      }
      (test.count(id) ? test_locs : train_locs).insert(it->second);
    }
    if (train_locs.size() < min_locations) {
      report.violations.push_back({cls.class_label, "train", train_locs.size()});
    }
    if (test_locs.size() < min_locations) {
      report.violations.push_back({cls.class_label, "test", test_locs.size()});
    }
  }
  report.validated = true;
  return report;
}

}  // namespace lcurve
