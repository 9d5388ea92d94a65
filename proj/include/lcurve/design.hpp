#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lcurve {

/// Indices floor(i*M/K), i = 0..K-1. Throws InputError when K > M.
std::vector<std::size_t> equal_space_indices(std::size_t m, std::size_t k);

/// Equal-spacing subsample of a time-ordered id list.
std::vector<std::string> equal_space_select(std::span<const std::string> ordered_ids,
                                            std::size_t k);

/// Candidate images of one class, already in time order.
struct ClassPool {
  std::string class_label;
  std::vector<std::string> ids;
};

enum class SubsetMode { nested, independent };

struct ClassSplit {
  std::string class_label;
  std::vector<std::string> pool;
  std::vector<std::string> test_ids;
  std::map<std::int64_t, std::vector<std::string>> train_subsets;

  friend bool operator==(const ClassSplit&, const ClassSplit&) = default;
};

struct SamplingManifest {
  std::vector<ClassSplit> classes;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> size_ladder;
  std::int64_t test_size = 250;
  SubsetMode mode = SubsetMode::nested;

  friend bool operator==(const SamplingManifest&, const SamplingManifest&) = default;
};

/// Seeded test split per class, then training subsets from the remaining
/// images: prefixes of one shuffle (nested) or separate draws (independent).
/// Throws InputError naming the class and the shortfall when a pool holds
/// fewer than test_size + max(ladder) images.
SamplingManifest split_design(std::span<const ClassPool> pools, std::int64_t test_size,
                              std::vector<std::int64_t> size_ladder, std::uint64_t seed,
                              SubsetMode mode = SubsetMode::nested);

struct CoverageViolation {
  std::string class_label;
  std::string split;  // "train" or "test"
  std::size_t locations = 0;

  friend bool operator==(const CoverageViolation&, const CoverageViolation&) = default;
};

struct CoverageReport {
  bool validated = false;  // false when some image has no location
  std::string reason;
  std::vector<CoverageViolation> violations;

  bool ok() const { return validated && violations.empty(); }
};

/// Counts distinct locations per class in the training pool (everything not in
/// the test split) and in the test split.
CoverageReport validate_location_coverage(const SamplingManifest& manifest,
                                          const std::map<std::string, std::string>& location_of,
                                          std::size_t min_locations = 3);

}  // namespace lcurve
