#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ash/tensor.hpp"

namespace ash {

// Detection scores are oriented so that higher means more in-distribution.

/// Negative energy, log(sum_i exp(z_i)), via max subtraction. Needs C >= 2.
double energy_score(std::span<const double> logits);

/// Maximum softmax probability of z / temperature. Needs C >= 2, T > 0.
double softmax_score(std::span<const double> logits, double temperature = 1.0);

inline constexpr std::size_t kDefaultKnnK = 50;

/// Exact k-nearest-neighbour index over ID feature vectors. With
/// normalization on, bank vectors and queries are scaled to unit L2 norm.
class KnnIndex {
 public:
  /// Throws on an empty bank, mismatched dims, k == 0 or k > bank size, and
  /// (when normalizing) on a zero-norm bank vector.
  static KnnIndex fit(std::span<const FeatureTensor> features, std::size_t k = kDefaultKnnK,
                      bool normalize = true);

  /// Negative Euclidean distance from the (normalized) query to its k-th
  /// nearest bank vector.
  double score(const FeatureTensor& query) const;

  std::size_t k() const noexcept { return k_; }
  bool normalize() const noexcept { return normalize_; }
  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> vector(std::size_t i) const {
    return std::span<const double>(bank_).subspan(i * dim_, dim_);
  }

 private:
  std::vector<double> bank_;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::size_t k_ = 0;
  bool normalize_ = true;
};

}  // namespace ash
