#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ash/tensor.hpp"

namespace ash {

enum class DatasetRole { train, id_eval, ood_eval };

std::string_view to_string(DatasetRole role);
DatasetRole parse_dataset_role(std::string_view name);

/// Class label of an ID entry, or kOodLabel for entries tagged OOD
/// (serialized as the string "ood").
inline constexpr int kOodLabel = -1;

struct ManifestEntry {
  std::filesystem::path path;
  int label = kOodLabel;
};

/// JSON document `{"role": ..., "entries": [{"path": ..., "label": ...}]}`.
/// Relative entry paths are relative to the manifest's own directory.
struct DatasetManifest {
  DatasetRole role = DatasetRole::train;
  std::vector<ManifestEntry> entries;
};

struct LabeledSample {
  FeatureTensor x;
  int label = kOodLabel;
};

/// Parses and resolves entry paths against the manifest directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Reads every referenced tensor. Missing files, unreadable tensors and
/// tensors whose dims differ from the first entry raise Error naming the file.
std::vector<LabeledSample> load_samples(const DatasetManifest& manifest);

}  // namespace ash
