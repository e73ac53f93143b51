#include "ash/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ash/error.hpp"

namespace ash {
namespace {

void check_sides(const ScoreSet& s) {
  if (s.id.empty() || s.ood.empty()) {
    throw Error(Errc::empty_input, "both ID and OOD score lists must be nonempty");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(s.id.begin(), s.id.end(), finite) ||
      !std::all_of(s.ood.begin(), s.ood.end(), finite)) {
    throw Error(Errc::non_finite, "score");
  }
}

struct Labeled {
  double score;
  bool is_id;
};

std::vector<Labeled> pooled(const ScoreSet& s) {
  std::vector<Labeled> all;
  all.reserve(s.id.size() + s.ood.size());
  for (double v : s.id) all.push_back({v, true});
  for (double v : s.ood) all.push_back({v, false});
  return all;
}

}  // namespace

double auroc(const ScoreSet& s) {
  check_sides(s);
  auto all = pooled(s);
  std::sort(all.begin(), all.end(),
            [](const Labeled& a, const Labeled& b) { return a.score < b.score; });
  // Midranks (1-based); rank sums stay exact in double at any realistic size.
  double id_rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    std::size_t ids = 0;
    while (j < all.size() && all[j].score == all[i].score) ids += all[j++].is_id;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    id_rank_sum += midrank * static_cast<double>(ids);
    i = j;
  }
  const auto n_id = static_cast<double>(s.id.size());
  const auto n_ood = static_cast<double>(s.ood.size());
  const double u = id_rank_sum - n_id * (n_id + 1.0) / 2.0;
  return u / (n_id * n_ood);
}

double aupr(const ScoreSet& s) {
  check_sides(s);
  auto all = pooled(s);
  std::sort(all.begin(), all.end(),
            [](const Labeled& a, const Labeled& b) { return a.score > b.score; });
  const auto n_id = static_cast<double>(s.id.size());
  std::size_t tp = 0;
  std::size_t fp = 0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) {
      (all[j].is_id ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / n_id;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double fpr_at_tpr(const ScoreSet& s, double tpr_target) {
  check_sides(s);
  if (!(tpr_target > 0.0 && tpr_target <= 1.0)) {
    throw Error(Errc::invalid_argument, "tpr target must lie in (0, 1]");
  }
  std::vector<double> id = s.id;
  std::sort(id.begin(), id.end(), std::greater<>());
  const std::size_t n = id.size();
  // Smallest m with m/n >= target, evaluated the same way a threshold scan
  // would compute the TPR, so the rounding of m/n cannot disagree.
  std::size_t m = static_cast<std::size_t>(std::ceil(tpr_target * static_cast<double>(n)));
  m = std::clamp<std::size_t>(m, 1, n);
  auto tpr = [n](std::size_t k) { return static_cast<double>(k) / static_cast<double>(n); };
  while (m > 1 && tpr(m - 1) >= tpr_target) --m;
  while (m < n && tpr(m) < tpr_target) ++m;
  const double tau = id[m - 1];
  const auto false_pos = std::count_if(s.ood.begin(), s.ood.end(),
                                       [tau](double v) { return v >= tau; });
  return static_cast<double>(false_pos) / static_cast<double>(s.ood.size());
}

double hist_iou(const ScoreSet& s, int bins) {
  check_sides(s);
  if (bins < 1) throw Error(Errc::invalid_argument, "bins must be >= 1");
  const auto [id_lo, id_hi] = std::minmax_element(s.id.begin(), s.id.end());
  const auto [ood_lo, ood_hi] = std::minmax_element(s.ood.begin(), s.ood.end());
  const double lo = std::min(*id_lo, *ood_lo);
  const double hi = std::max(*id_hi, *ood_hi);
  if (lo == hi) return 1.0;

  const auto nb = static_cast<std::size_t>(bins);
  auto histogram = [&](const std::vector<double>& values) {
    std::vector<double> h(nb, 0.0);
    for (double v : values) {
      const double pos = (v - lo) * static_cast<double>(bins) / (hi - lo);
      const double b = std::ceil(pos) - 1.0;
      const auto idx = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
      h[idx] += 1.0;
    }
    // Density normalization; the common bin width cancels in the ratio.
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double& c : h) c /= static_cast<double>(values.size()) * width;
    return h;
  };
  const auto a = histogram(s.id);
  const auto b = histogram(s.ood);
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    inter += std::min(a[i], b[i]);
    uni += std::max(a[i], b[i]);
  }
  return inter / uni;
}

double id_accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(Errc::dim_mismatch, "predictions and labels differ in length");
  }
  if (predictions.empty()) throw Error(Errc::empty_input, "no predictions");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

MetricReport evaluate_scores(const ScoreSet& s, int iou_bins) {
  MetricReport r;
  r.auroc = auroc(s);
  r.aupr = aupr(s);
  r.fpr95 = fpr_at_tpr(s, 0.95);
  r.iou = hist_iou(s, iou_bins);
  r.id_count = s.id.size();
  r.ood_count = s.ood.size();
  return r;
}

}  // namespace ash
