#include "ash/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "ash/error.hpp"
#include "ash/tensor_io.hpp"

namespace ash {

using nlohmann::json;

std::string_view to_string(DatasetRole role) {
  switch (role) {
    case DatasetRole::train: return "train";
    case DatasetRole::id_eval: return "id-eval";
    case DatasetRole::ood_eval: return "ood-eval";
  }
  return "train";
}

DatasetRole parse_dataset_role(std::string_view name) {
  if (name == "train") return DatasetRole::train;
  if (name == "id-eval") return DatasetRole::id_eval;
  if (name == "ood-eval") return DatasetRole::ood_eval;
  throw Error(Errc::bad_config, "unknown dataset role '" + std::string(name) + "'");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open manifest " + path.string());
  DatasetManifest manifest;
  try {
    const json doc = json::parse(in);
    manifest.role = parse_dataset_role(doc.at("role").get<std::string>());
    const auto base = path.parent_path();
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      std::filesystem::path p = e.at("path").get<std::string>();
      entry.path = p.is_absolute() ? p : base / p;
      const auto& label = e.at("label");
      if (label.is_string()) {
        if (label.get<std::string>() != "ood") {
          throw Error(Errc::bad_config, "label must be an integer class or \"ood\"");
        }
        entry.label = kOodLabel;
      } else {
        entry.label = label.get<int>();
        if (entry.label < 0) throw Error(Errc::bad_config, "negative class label");
      }
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json label = e.label == kOodLabel ? json("ood") : json(e.label);
    entries.push_back({{"path", e.path.generic_string()}, {"label", std::move(label)}});
  }
  const json doc = {{"role", to_string(manifest.role)}, {"entries", std::move(entries)}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<LabeledSample> load_samples(const DatasetManifest& manifest) {
  std::vector<LabeledSample> samples;
  samples.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    if (!std::filesystem::exists(entry.path)) {
      throw Error(Errc::io_error, "missing tensor file " + entry.path.string());
    }
    FeatureTensor x = read_tensor(entry.path);
    if (!samples.empty() && !std::ranges::equal(x.dims(), samples.front().x.dims())) {
      throw Error(Errc::dim_mismatch, entry.path.string());
    }
    samples.push_back({std::move(x), entry.label});
  }
  return samples;
}

}  // namespace ash
