#include "ash/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ash/error.hpp"

namespace ash {
namespace {

void check_logits(std::span<const double> logits) {
  if (logits.size() < 2) throw Error(Errc::invalid_argument, "need at least two logits");
  for (double z : logits) {
    if (!std::isfinite(z)) throw Error(Errc::non_finite, "logit");
  }
}

// Normalized copy in double; zero vectors are returned unchanged.
std::vector<double> unit(std::span<const float> v, bool normalize) {
  std::vector<double> out(v.begin(), v.end());
  if (!normalize) return out;
  double norm = 0.0;
  for (double x : out) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : out) x /= norm;
  }
  return out;
}

}  // namespace

double energy_score(std::span<const double> logits) {
  check_logits(logits);
  const double m = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double z : logits) acc += std::exp(z - m);
  return m + std::log(acc);
}

double softmax_score(std::span<const double> logits, double temperature) {
  check_logits(logits);
  if (!(temperature > 0.0)) throw Error(Errc::invalid_argument, "temperature must be positive");
  const double m = *std::max_element(logits.begin(), logits.end());
  double acc = 0.0;
  for (double z : logits) acc += std::exp((z - m) / temperature);
  // The max logit contributes exp(0) = 1 to the numerator.
  return 1.0 / acc;
}

KnnIndex KnnIndex::fit(std::span<const FeatureTensor> features, std::size_t k, bool normalize) {
  if (features.empty()) throw Error(Errc::empty_input, "knn bank is empty");
  if (k == 0 || k > features.size()) {
    throw Error(Errc::invalid_argument, "k=" + std::to_string(k) + " with bank size " +
                                            std::to_string(features.size()));
  }
  KnnIndex idx;
  idx.dim_ = features.front().size();
  idx.count_ = features.size();
  idx.k_ = k;
  idx.normalize_ = normalize;
  idx.bank_.reserve(idx.dim_ * idx.count_);
  for (const auto& f : features) {
    if (f.empty() || !std::ranges::equal(f.dims(), features.front().dims())) {
      throw Error(Errc::dim_mismatch, "knn bank vectors must share dims");
    }
    const auto v = unit(f.values(), normalize);
    if (normalize && std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
      throw Error(Errc::invalid_argument, "cannot normalize a zero feature vector");
    }
    idx.bank_.insert(idx.bank_.end(), v.begin(), v.end());
  }
  return idx;
}

double KnnIndex::score(const FeatureTensor& query) const {
  if (query.size() != dim_) {
    throw Error(Errc::dim_mismatch, "query has " + std::to_string(query.size()) +
                                        " elements, bank has " + std::to_string(dim_));
  }
  const auto q = unit(query.values(), normalize_);
  std::vector<double> dist2(count_);
  for (std::size_t i = 0; i < count_; ++i) {
    const auto b = vector(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double d = q[j] - b[j];
      acc += d * d;
    }
    dist2[i] = acc;
  }
  auto kth = dist2.begin() + static_cast<std::ptrdiff_t>(k_ - 1);
  std::nth_element(dist2.begin(), kth, dist2.end());
  return -std::sqrt(*kth);
}

}  // namespace ash
