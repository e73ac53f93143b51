#pragma once

#include <cstddef>
#include <span>

#include "ash/tensor.hpp"

namespace ash {

/// 1-indexed nearest rank k = max(1, ceil(p/100 * n)) for p in [0, 100).
std::size_t nearest_rank(std::size_t n, double p);

/// p-th percentile under the nearest-rank convention: the k-th smallest
/// value. Elements strictly below the result are exactly the ones a
/// pruning step removes. Expected O(n) via selection on a scratch copy.
double percentile_threshold(std::span<const float> values, double p);

inline double percentile_threshold(const FeatureTensor& x, double p) {
  return percentile_threshold(x.values(), p);
}

void check_percentile(double p);

}  // namespace ash
