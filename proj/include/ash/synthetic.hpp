#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ash/manifest.hpp"

namespace ash {

enum class SyntheticKind { gaussian_blobs_id, shifted_blobs_ood, uniform_ring_ood };

std::string_view to_string(SyntheticKind kind);
SyntheticKind parse_synthetic_kind(std::string_view name);

/// Seeded synthetic dataset. Blob centres depend only on layout_seed, so an
/// ID set and a shifted-blob OOD set built from the same layout share their
/// geometry while drawing independent samples from `seed`.
struct SyntheticDatasetSpec {
  SyntheticKind kind = SyntheticKind::gaussian_blobs_id;
  std::uint32_t dim = 16;
  std::uint32_t classes = 4;
  std::uint32_t samples_per_class = 100;
  double spread = 1.0;  // per-coordinate std of each blob
  std::uint64_t seed = 0;
  std::uint64_t layout_seed = 0;
  double center_radius = 4.0;  // distance of blob centres from the origin
  double shift = 4.0;          // shifted blobs: offset along a layout direction
  double ring_radius = 8.0;    // ring: sample norm, within +/-0.5%

  void validate() const;
};

/// classes * samples_per_class samples. ID blobs carry class labels, both
/// OOD kinds carry kOodLabel.
std::vector<LabeledSample> sample_synthetic(const SyntheticDatasetSpec& spec);

/// Writes `<prefix>_NNNNN.asht` files and `<prefix>.json` into `dir`.
/// Returns the manifest (entry paths relative to `dir`).
DatasetManifest generate_dataset(const SyntheticDatasetSpec& spec, DatasetRole role,
                                 const std::filesystem::path& dir, const std::string& prefix);

}  // namespace ash
