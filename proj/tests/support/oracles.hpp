#pragma once

// Slow, obviously-correct reference implementations. Nothing here calls
// into the library's own algorithms.

#include <cstdint>
#include <vector>

namespace oracle {

/// Nearest-rank percentile by full sort: element k-1 of the sorted copy
/// with k = max(1, ceil(p*n/100)), computed in integers for integral p.
float percentile(std::vector<float> values, int p);

/// Pairwise Mann-Whitney count.
double auroc(const std::vector<double>& id, const std::vector<double>& ood);

/// Mean over ID samples of precision at that sample's own score.
double average_precision(const std::vector<double>& id, const std::vector<double>& ood);

/// Exhaustive threshold scan over every pooled score.
double fpr_at_tpr(const std::vector<double>& id, const std::vector<double>& ood, double target);

/// Histogram IoU with explicit edge search (right-closed bins).
double hist_iou(const std::vector<double>& id, const std::vector<double>& ood, int bins);

double log_sum_exp_naive(const std::vector<double>& z);

}  // namespace oracle
