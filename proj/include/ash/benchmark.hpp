#pragma once

#include <cstdint>
#include <vector>

#include "ash/netlab.hpp"
#include "ash/synthetic.hpp"

namespace ash {

/// Everything needed to rebuild the desk-scale benchmark bit for bit.
struct BenchmarkSpec {
  SyntheticDatasetSpec train;
  SyntheticDatasetSpec id_eval;
  SyntheticDatasetSpec ood_shifted;
  SyntheticDatasetSpec ood_ring;
  std::vector<std::uint32_t> widths;  // input, hidden..., classes
  std::uint64_t init_seed = 0;
  TrainOptions train_options;
};

/// The shipped seeded benchmark: Gaussian-blob ID data, shifted-blob and
/// ring OOD data, a 3-layer ReLU classifier with zero final bias and the
/// hook at the penultimate layer.
BenchmarkSpec standard_benchmark_spec();

struct Benchmark {
  FeedforwardNet net;
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> id_eval;
  std::vector<LabeledSample> ood_eval;  // shifted blobs followed by the ring
  std::vector<double> loss_curve;
};

Benchmark build_benchmark(const BenchmarkSpec& spec);

}  // namespace ash
