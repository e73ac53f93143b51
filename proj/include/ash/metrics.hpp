#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ash {

/// Detection scores split by ground truth. ID is the positive class and
/// higher scores mean "more ID".
struct ScoreSet {
  std::vector<double> id;
  std::vector<double> ood;
};

/// Mann-Whitney statistic: mean over (id, ood) pairs of 1 / 0.5 / 0 for
/// id > ood / tie / id < ood. Rank based, O(N log N).
double auroc(const ScoreSet& s);

/// Step-wise average precision with ID positive: thresholds are scanned
/// over unique scores in descending order and AP = sum (R_i - R_{i-1}) P_i.
double aupr(const ScoreSet& s);

/// FPR at the largest threshold tau whose TPR (fraction of ID >= tau) is at
/// least `tpr_target`; a sample is called ID iff its score >= tau.
double fpr_at_tpr(const ScoreSet& s, double tpr_target = 0.95);

inline constexpr int kDefaultIouBins = 50;

/// Intersection over union of the density histograms of both sides over the
/// joint [min, max] range. Bins are right-closed, (lo, hi], with the first
/// bin also holding the minimum. All scores equal gives 1.
double hist_iou(const ScoreSet& s, int bins = kDefaultIouBins);

double id_accuracy(std::span<const int> predictions, std::span<const int> labels);

struct MetricReport {
  double auroc = 0.0;
  double aupr = 0.0;
  double fpr95 = 0.0;
  std::optional<double> id_accuracy;
  std::optional<double> iou;
  std::size_t id_count = 0;
  std::size_t ood_count = 0;
};

/// All threshold-free metrics plus histogram IoU for one score set.
MetricReport evaluate_scores(const ScoreSet& s, int iou_bins = kDefaultIouBins);

}  // namespace ash
