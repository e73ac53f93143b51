#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

float percentile(std::vector<float> values, int p) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long long>(values.size());
  long long k = (p * n + 99) / 100;
  if (k < 1) k = 1;
  return values[static_cast<std::size_t>(k - 1)];
}

double auroc(const std::vector<double>& id, const std::vector<double>& ood) {
  double wins = 0.0;
  for (double a : id) {
    for (double b : ood) {
      if (a > b) wins += 1.0;
      else if (a == b) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

double average_precision(const std::vector<double>& id, const std::vector<double>& ood) {
  double total = 0.0;
  for (double t : id) {
    double tp = 0.0;
    double fp = 0.0;
    for (double a : id) tp += a >= t;
    for (double b : ood) fp += b >= t;
    total += tp / (tp + fp);
  }
  return total / static_cast<double>(id.size());
}

double fpr_at_tpr(const std::vector<double>& id, const std::vector<double>& ood, double target) {
  std::vector<double> candidates = id;
  candidates.insert(candidates.end(), ood.begin(), ood.end());
  double best = -std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    double tp = 0.0;
    for (double a : id) tp += a >= t;
    if (tp / static_cast<double>(id.size()) >= target) best = std::max(best, t);
  }
  double fp = 0.0;
  for (double b : ood) fp += b >= best;
  return fp / static_cast<double>(ood.size());
}

double hist_iou(const std::vector<double>& id, const std::vector<double>& ood, int bins) {
  double lo = id[0];
  double hi = id[0];
  for (const auto* side : {&id, &ood}) {
    for (double v : *side) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == hi) return 1.0;
  std::vector<double> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * b / bins;
  edges[bins] = hi;
  auto hist = [&](const std::vector<double>& values) {
    std::vector<double> h(bins, 0.0);
    for (double v : values) {
      int b = 0;
      while (b < bins - 1 && v > edges[b + 1]) ++b;
      h[b] += 1.0 / static_cast<double>(values.size());
    }
    return h;
  };
  const auto a = hist(id);
  const auto c = hist(ood);
  double inter = 0.0;
  double uni = 0.0;
  for (int b = 0; b < bins; ++b) {
    inter += std::min(a[b], c[b]);
    uni += std::max(a[b], c[b]);
  }
  return inter / uni;
}

double log_sum_exp_naive(const std::vector<double>& z) {
  long double s = 0.0L;
  for (double v : z) s += std::exp(static_cast<long double>(v));
  return static_cast<double>(std::log(s));
}

}  // namespace oracle
