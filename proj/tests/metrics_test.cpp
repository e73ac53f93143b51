#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ash/error.hpp"
#include "ash/metrics.hpp"
#include "support/oracles.hpp"

namespace {

using ash::ScoreSet;
using V = std::vector<double>;

TEST(Auroc, Examples) {
  EXPECT_EQ(ash::auroc({{3, 2}, {1, 0}}), 1.0);
  EXPECT_EQ(ash::auroc({{2, 0}, {1, 1}}), 0.5);
  EXPECT_EQ(ash::auroc({{1, 2, 2, 5}, {2, 5, 1, 2}}), 0.5);
  EXPECT_THROW(ash::auroc({{}, {1}}), ash::Error);
  EXPECT_THROW(ash::auroc({{1}, {}}), ash::Error);
}

TEST(Fpr, Examples) {
  V id;
  for (int i = 1; i <= 20; ++i) id.push_back(i);
  EXPECT_EQ(ash::fpr_at_tpr({id, {0.5, 10.5}}), 0.5);
  EXPECT_EQ(ash::fpr_at_tpr({id, {-1, 0}}), 0.0);
  EXPECT_EQ(ash::fpr_at_tpr({id, {21, 30}}), 1.0);
}

TEST(Aupr, Examples) {
  V id, ood;
  for (int i = 0; i < 10; ++i) {
    id.push_back(10 + i);
    ood.push_back(i);
  }
  EXPECT_EQ(ash::aupr({id, ood}), 1.0);
  EXPECT_EQ(ash::aupr({{1}, {2}}), 0.5);
}

TEST(Aupr, RandomInterleavingApproachesPrevalence) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u;
  V id(5000), ood(5000);
  for (auto& v : id) v = u(rng);
  for (auto& v : ood) v = u(rng);
  EXPECT_NEAR(ash::aupr({id, ood}), 0.5, 0.05);
}

TEST(HistIou, Examples) {
  EXPECT_EQ(ash::hist_iou({{1, 2, 3}, {3, 1, 2}}, 10), 1.0);
  EXPECT_EQ(ash::hist_iou({{0, 1}, {9, 10}}, 10), 0.0);
  EXPECT_NEAR(ash::hist_iou({{0, 1}, {0, 2}}, 2), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(ash::hist_iou({{4, 4}, {4}}, 7), 1.0);
  EXPECT_THROW(ash::hist_iou({{1}, {2}}, 0), ash::Error);
}

TEST(IdAccuracy, Examples) {
  EXPECT_EQ(ash::id_accuracy(std::vector{1, 2, 3}, std::vector{1, 2, 3}), 1.0);
  EXPECT_EQ(ash::id_accuracy(std::vector{0, 0}, std::vector{1, 1}), 0.0);
  EXPECT_EQ(ash::id_accuracy(std::vector{1, 2, 3, 4}, std::vector{1, 2, 3, 0}), 0.75);
  EXPECT_THROW(ash::id_accuracy(std::vector{1}, std::vector{1, 2}), ash::Error);
}

ScoreSet random_tied_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 50);
  std::uniform_int_distribution<int> levels(1, 12);
  const int l = levels(rng);
  std::uniform_int_distribution<int> value(0, l);
  ScoreSet s{V(size(rng)), V(size(rng))};
  for (auto& v : s.id) v = value(rng) * 0.5;
  for (auto& v : s.ood) v = value(rng) * 0.5;
  return s;
}

TEST(MetricsOracle, FastPathsMatchBruteForce) {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_tied_set(rng);
    ASSERT_NEAR(ash::auroc(s), oracle::auroc(s.id, s.ood), 1e-9);
    ASSERT_NEAR(ash::aupr(s), oracle::average_precision(s.id, s.ood), 1e-9);
    ASSERT_NEAR(ash::fpr_at_tpr(s, 0.95), oracle::fpr_at_tpr(s.id, s.ood, 0.95), 1e-9);
    ASSERT_NEAR(ash::hist_iou(s, 6), oracle::hist_iou(s.id, s.ood, 6), 1e-9);
  }
}

TEST(MetricsProperty, MonotoneTransformInvariance) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_tied_set(rng);
    ScoreSet t = s;
    for (auto* side : {&t.id, &t.ood}) {
      for (auto& v : *side) v = std::exp(3.0 * v) - 7.0;
    }
    ASSERT_NEAR(ash::auroc(t), ash::auroc(s), 1e-12);
    ASSERT_NEAR(ash::aupr(t), ash::aupr(s), 1e-12);
    ASSERT_NEAR(ash::fpr_at_tpr(t), ash::fpr_at_tpr(s), 1e-12);
  }
}

TEST(MetricsProperty, ComplementSymmetryAndRanges) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_tied_set(rng);
    ASSERT_NEAR(ash::auroc(s) + ash::auroc({s.ood, s.id}), 1.0, 1e-12);
    const auto r = ash::evaluate_scores(s);
    for (double m : {r.auroc, r.aupr, r.fpr95, *r.iou}) {
      ASSERT_GE(m, 0.0);
      ASSERT_LE(m, 1.0);
    }
    ASSERT_EQ(ash::hist_iou({s.id, s.id}), 1.0);
  }
}

}  // namespace
