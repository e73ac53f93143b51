#include "ash/benchmark.hpp"

namespace ash {

BenchmarkSpec standard_benchmark_spec() {
  BenchmarkSpec spec;

  SyntheticDatasetSpec id;
  id.kind = SyntheticKind::gaussian_blobs_id;
  id.dim = 16;
  id.classes = 4;
  id.spread = 1.0;
  id.layout_seed = 2022;
  id.center_radius = 4.0;
  id.shift = 4.0;
  id.ring_radius = 8.0;

  spec.train = id;
  spec.train.samples_per_class = 250;
  spec.train.seed = 1;

  spec.id_eval = id;
  spec.id_eval.samples_per_class = 125;
  spec.id_eval.seed = 2;

  spec.ood_shifted = id;
  spec.ood_shifted.kind = SyntheticKind::shifted_blobs_ood;
  spec.ood_shifted.samples_per_class = 63;
  spec.ood_shifted.seed = 3;

  spec.ood_ring = id;
  spec.ood_ring.kind = SyntheticKind::uniform_ring_ood;
  spec.ood_ring.samples_per_class = 62;
  spec.ood_ring.seed = 4;

  spec.widths = {id.dim, 64, 128, id.classes};
  spec.init_seed = 5;
  spec.train_options.epochs = 30;
  spec.train_options.lr = 0.05;
  spec.train_options.batch_size = 32;
  spec.train_options.seed = 6;
  spec.train_options.freeze_final_bias = true;
  return spec;
}

Benchmark build_benchmark(const BenchmarkSpec& spec) {
  Benchmark b;
  b.train = sample_synthetic(spec.train);
  b.id_eval = sample_synthetic(spec.id_eval);
  b.ood_eval = sample_synthetic(spec.ood_shifted);
  auto ring = sample_synthetic(spec.ood_ring);
  b.ood_eval.insert(b.ood_eval.end(), ring.begin(), ring.end());

  b.net = FeedforwardNet::create(spec.widths, spec.init_seed);
  b.net.hook = HookSite::penultimate();
  b.loss_curve = train(b.net, b.train, spec.train_options);
  return b;
}

}  // namespace ash
