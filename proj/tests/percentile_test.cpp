#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ash/error.hpp"
#include "ash/percentile.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

double pct(std::vector<float> v, double p) { return ash::percentile_threshold(v, p); }

TEST(Percentile, WorkedExamples) {
  EXPECT_EQ(pct({1, 2, 3, 4}, 50), 2.0);
  EXPECT_EQ(pct({1, 2, 3, 4}, 0), 1.0);
  EXPECT_EQ(pct({5, 5, 5, 5}, 90), 5.0);
  EXPECT_EQ(pct({1, 2, 3, 4}, 75), 3.0);
  EXPECT_EQ(pct({4, 3, 2, 1}, 99.9), 4.0);
}

TEST(Percentile, Errors) {
  EXPECT_THROW(pct({}, 50), ash::Error);
  EXPECT_THROW(pct({1}, 100), ash::Error);
  EXPECT_THROW(pct({1}, -0.5), ash::Error);
  try {
    pct({1}, 100);
  } catch (const ash::Error& e) {
    EXPECT_EQ(e.code(), ash::Errc::bad_percentile);
  }
}

TEST(Percentile, MatchesSortOracle) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> size(1, 300);
  std::uniform_int_distribution<int> p(0, 99);
  std::uniform_int_distribution<int> small(-5, 5);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<float> v(size(rng));
    if (trial % 2) {
      v = fixture::normal_values(rng, v.size());
    } else {
      for (auto& x : v) x = static_cast<float>(small(rng));  // heavy ties
    }
    const int pp = p(rng);
    ASSERT_EQ(pct(v, pp), oracle::percentile(v, pp)) << "n=" << v.size() << " p=" << pp;
  }
}

TEST(Percentile, StrictlyBelowCountOnDistinctValues) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(1, 500);
  std::uniform_real_distribution<double> p(0.0, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto v = fixture::distinct_values(rng, size(rng));
    double pp = p(rng);
    if (pp == 0.0) continue;
    const double t = pct(v, pp);
    const auto below = std::count_if(v.begin(), v.end(), [t](float x) { return x < t; });
    const auto n = static_cast<long double>(v.size());
    const auto expected = std::max<long long>(1, static_cast<long long>(std::ceil(pp / 100.0L * n))) - 1;
    ASSERT_EQ(below, expected) << "n=" << v.size() << " p=" << pp;
  }
}

TEST(Percentile, PermutationInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    auto v = fixture::normal_values(rng, 1 + trial);
    const double before = pct(v, trial % 100);
    std::shuffle(v.begin(), v.end(), rng);
    ASSERT_EQ(pct(v, trial % 100), before);
  }
}

TEST(Percentile, NearestRankBounds) {
  EXPECT_EQ(ash::nearest_rank(4, 0), 1u);
  EXPECT_EQ(ash::nearest_rank(4, 50), 2u);
  EXPECT_EQ(ash::nearest_rank(4, 99.9), 4u);
  EXPECT_EQ(ash::nearest_rank(10, 90), 9u);
  EXPECT_EQ(ash::nearest_rank(1, 99), 1u);
}

}  // namespace
