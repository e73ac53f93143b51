#include "ash/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "ash/error.hpp"
#include "ash/tensor_io.hpp"

namespace ash {

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::gaussian_blobs_id: return "gaussian-blobs-id";
    case SyntheticKind::shifted_blobs_ood: return "shifted-blobs-ood";
    case SyntheticKind::uniform_ring_ood: return "uniform-ring-ood";
  }
  return "gaussian-blobs-id";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  for (auto k : {SyntheticKind::gaussian_blobs_id, SyntheticKind::shifted_blobs_ood,
                 SyntheticKind::uniform_ring_ood}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::bad_config, "unknown dataset kind '" + std::string(name) + "'");
}

void SyntheticDatasetSpec::validate() const {
  if (dim == 0 || classes == 0 || samples_per_class == 0) {
    throw Error(Errc::bad_config, "dataset dims and counts must be positive");
  }
  if (!(spread >= 0.0) || !(center_radius >= 0.0) || !(ring_radius > 0.0) ||
      !std::isfinite(shift)) {
    throw Error(Errc::bad_config, "dataset geometry must be finite and nonnegative");
  }
}

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::uint32_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

struct Layout {
  std::vector<std::vector<double>> centers;
  std::vector<double> shift_direction;
};

Layout make_layout(const SyntheticDatasetSpec& spec) {
  std::mt19937_64 rng(spec.layout_seed);
  Layout layout;
  for (std::uint32_t c = 0; c < spec.classes; ++c) {
    auto u = random_unit(rng, spec.dim);
    for (auto& x : u) x *= spec.center_radius;
    layout.centers.push_back(std::move(u));
  }
  layout.shift_direction = random_unit(rng, spec.dim);
  return layout;
}

}  // namespace

std::vector<LabeledSample> sample_synthetic(const SyntheticDatasetSpec& spec) {
  spec.validate();
  const auto layout = make_layout(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::vector<LabeledSample> out;
  out.reserve(std::size_t{spec.classes} * spec.samples_per_class);
  for (std::uint32_t c = 0; c < spec.classes; ++c) {
    for (std::uint32_t i = 0; i < spec.samples_per_class; ++i) {
      std::vector<float> v(spec.dim);
      switch (spec.kind) {
        case SyntheticKind::gaussian_blobs_id:
        case SyntheticKind::shifted_blobs_ood: {
          const bool shifted = spec.kind == SyntheticKind::shifted_blobs_ood;
          for (std::uint32_t d = 0; d < spec.dim; ++d) {
            double x = layout.centers[c][d] + spec.spread * normal(rng);
            if (shifted) x += spec.shift * layout.shift_direction[d];
            v[d] = static_cast<float>(x);
          }
          break;
        }
        case SyntheticKind::uniform_ring_ood: {
          const auto dir = random_unit(rng, spec.dim);
          const double radius = spec.ring_radius * (1.0 + 0.005 * unif(rng));
          for (std::uint32_t d = 0; d < spec.dim; ++d) v[d] = static_cast<float>(radius * dir[d]);
          break;
        }
      }
      const int label = spec.kind == SyntheticKind::gaussian_blobs_id ? static_cast<int>(c)
                                                                      : kOodLabel;
      out.push_back({FeatureTensor(std::move(v)), label});
    }
  }
  return out;
}

DatasetManifest generate_dataset(const SyntheticDatasetSpec& spec, DatasetRole role,
                                 const std::filesystem::path& dir, const std::string& prefix) {
  const auto samples = sample_synthetic(spec);
  std::filesystem::create_directories(dir);
  DatasetManifest manifest;
  manifest.role = role;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "_%05zu.asht", i);
    const std::string file = prefix + name;
    write_tensor(samples[i].x, dir / file);
    manifest.entries.push_back({file, samples[i].label});
  }
  save_manifest(manifest, dir / (prefix + ".json"));
  return manifest;
}

}  // namespace ash
