#include "ash/percentile.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ash/error.hpp"

namespace ash {

void check_percentile(double p) {
  if (!(p >= 0.0 && p < 100.0)) {
    throw Error(Errc::bad_percentile, "p=" + std::to_string(p) + " outside [0, 100)");
  }
}

std::size_t nearest_rank(std::size_t n, double p) {
  check_percentile(p);
  // p * n first: exact for integral p and any realistic n, so the ceil sees
  // an exact multiple of 100 whenever there is one.
  const double rank = std::ceil(p * static_cast<double>(n) / 100.0);
  const auto k = static_cast<std::size_t>(rank);
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

double percentile_threshold(std::span<const float> values, double p) {
  if (values.empty()) throw Error(Errc::empty_input, "percentile of empty tensor");
  const std::size_t k = nearest_rank(values.size(), p);
  std::vector<float> scratch(values.begin(), values.end());
  auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(scratch.begin(), nth, scratch.end());
  return *nth;
}

}  // namespace ash
