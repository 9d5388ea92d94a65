#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "lcurve/design.hpp"
#include "lcurve/error.hpp"

using namespace lcurve;

namespace {

std::vector<ClassPool> make_pools(std::size_t per_class, std::vector<std::string> labels) {
  std::vector<ClassPool> pools;
  for (const auto& l : labels) {
    ClassPool p{l, {}};
    for (std::size_t i = 0; i < per_class; ++i) p.ids.push_back(l + "_" + std::to_string(i));
    pools.push_back(std::move(p));
  }
  return pools;
}

const std::vector<std::int64_t> kLadder = {10, 20, 50, 150, 500, 1000};

}  // namespace

TEST(EqualSpace, Examples) {
  EXPECT_EQ(equal_space_indices(10, 3), (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_EQ(equal_space_indices(5, 5), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_THROW(equal_space_indices(3, 5), InputError);
}

TEST(EqualSpace, StrideTenSubsample) {
  const auto idx = equal_space_indices(7500, 750);
  ASSERT_EQ(idx.size(), 750u);
  for (std::size_t i = 0; i < idx.size(); ++i) ASSERT_EQ(idx[i], 10 * i);
}

TEST(EqualSpace, MatchesFloorFormula) {
  for (std::size_t m = 1; m < 60; ++m) {
    for (std::size_t k = 1; k <= m; ++k) {
      const auto idx = equal_space_indices(m, k);
      for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(idx[i], (i * m) / k);
    }
  }
}

TEST(EqualSpace, SelectsIds) {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f"};
  EXPECT_EQ(equal_space_select(ids, 3), (std::vector<std::string>{"a", "c", "e"}));
}

TEST(SplitDesign, BalancedNestedPattern) {
  const auto pools = make_pools(1250, {"deer", "fox", "wolf"});
  const auto m = split_design(pools, 250, kLadder, 7);
  ASSERT_EQ(m.classes.size(), 3u);
  for (const auto& c : m.classes) {
    EXPECT_EQ(c.test_ids.size(), 250u);
    const std::set<std::string> test(c.test_ids.begin(), c.test_ids.end());
    EXPECT_EQ(test.size(), 250u);
    std::vector<std::string> prev;
    for (std::int64_t n : kLadder) {
      const auto& sub = c.train_subsets.at(n);
      ASSERT_EQ(static_cast<std::int64_t>(sub.size()), n);
      ASSERT_TRUE(std::equal(prev.begin(), prev.end(), sub.begin()));
      for (const auto& id : sub) ASSERT_EQ(test.count(id), 0u) << id;
      ASSERT_EQ(std::set<std::string>(sub.begin(), sub.end()).size(), sub.size());
      prev = sub;
    }
  }
}

TEST(SplitDesign, DeterministicPerSeed) {
  const auto pools = make_pools(1250, {"a", "b"});
  EXPECT_EQ(split_design(pools, 250, kLadder, 99), split_design(pools, 250, kLadder, 99));
  EXPECT_NE(split_design(pools, 250, kLadder, 99).classes[0].test_ids,
            split_design(pools, 250, kLadder, 100).classes[0].test_ids);
}

TEST(SplitDesign, ClassStreamsIndependentOfOtherClasses) {
  const auto one = split_design(make_pools(1250, {"a"}), 250, kLadder, 5);
  const auto two = split_design(make_pools(1250, {"a", "b"}), 250, kLadder, 5);
  EXPECT_EQ(one.classes[0], two.classes[0]);
}

TEST(SplitDesign, ShortfallNamesClass) {
  auto pools = make_pools(1250, {"a"});
  pools.push_back(make_pools(1200, {"lynx"})[0]);
  try {
    split_design(pools, 250, kLadder, 1);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("lynx"), std::string::npos);
    EXPECT_NE(msg.find("50"), std::string::npos);
  }
}

TEST(SplitDesign, IndependentSubsetsStayOutsideTest) {
  const auto m = split_design(make_pools(1250, {"a"}), 250, kLadder, 3, SubsetMode::independent);
  const auto& c = m.classes[0];
  const std::set<std::string> test(c.test_ids.begin(), c.test_ids.end());
  for (const auto& [n, sub] : c.train_subsets) {
    EXPECT_EQ(static_cast<std::int64_t>(sub.size()), n);
    for (const auto& id : sub) EXPECT_EQ(test.count(id), 0u);
  }
}

TEST(SplitDesign, RejectsDuplicates) {
  auto pools = make_pools(1250, {"a", "a"});
  EXPECT_THROW(split_design(pools, 250, kLadder, 1), InputError);
  auto dup = make_pools(1250, {"a"});
  dup[0].ids[1] = dup[0].ids[0];
  EXPECT_THROW(split_design(dup, 250, kLadder, 1), InputError);
}

namespace {

SamplingManifest tiny_manifest() {
  ClassSplit c;
  c.class_label = "a";
  c.pool = {"i1", "i2", "i3", "i4", "i5", "i6"};
  c.test_ids = {"i1", "i2", "i3"};
  c.train_subsets[3] = {"i4", "i5", "i6"};
  SamplingManifest m;
  m.classes = {c};
  m.test_size = 3;
  m.size_ladder = {3};
  return m;
}

}  // namespace

TEST(Coverage, AllSplitsCovered) {
  const std::map<std::string, std::string> loc = {{"i1", "L1"}, {"i2", "L2"}, {"i3", "L3"},
                                                  {"i4", "L1"}, {"i5", "L2"}, {"i6", "L3"}};
  const auto r = validate_location_coverage(tiny_manifest(), loc);
  EXPECT_TRUE(r.ok());
}

TEST(Coverage, TestSplitFromOneLocation) {
  const std::map<std::string, std::string> loc = {{"i1", "L1"}, {"i2", "L1"}, {"i3", "L1"},
                                                  {"i4", "L1"}, {"i5", "L2"}, {"i6", "L3"}};
  const auto r = validate_location_coverage(tiny_manifest(), loc);
  EXPECT_TRUE(r.validated);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (CoverageViolation{"a", "test", 1}));
}

TEST(Coverage, MissingLocationsAreNotValidated) {
  const auto r = validate_location_coverage(tiny_manifest(), {});
  EXPECT_FALSE(r.validated);
  EXPECT_FALSE(r.reason.empty());
  EXPECT_FALSE(r.ok());
}
