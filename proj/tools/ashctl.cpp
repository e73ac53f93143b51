// ashctl: experiment runner for the activation-shaping toolkit.
//
// Exit codes: 0 success, 2 config error, 3 data error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ash/benchmark.hpp"
#include "ash/error.hpp"
#include "ash/experiment.hpp"
#include "ash/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigError = 2;
constexpr int kDataError = 3;

void add_overrides(CLI::App* cmd, ash::ConfigOverrides& o) {
  cmd->add_option("--method", o.method, "shaping chain, e.g. ash-s or react-clip+ash-s");
  cmd->add_option("--p", o.p, "pruning percentile (replaces the sweep)");
  cmd->add_option("--score", o.score, "energy, softmax or knn");
  cmd->add_option("--threshold-mode", o.threshold_mode, "local or global");
  cmd->add_option("--temperature", o.temperature, "softmax temperature");
  cmd->add_option("--placement", o.placement, "hook site: penultimate or pre-relu[i]");
  cmd->add_option("--seed", o.seed, "experiment seed");
  cmd->add_option("--out", o.out, "output directory");
}

int cmd_run(const fs::path& config_path, const ash::ConfigOverrides& overrides) {
  const auto config = ash::load_config(config_path, overrides);
  const auto report = ash::run(config);
  const auto written = ash::write_report(report, config.out);
  std::cout << written.json.string() << '\n' << written.csv.string() << '\n';
  return 0;
}

int cmd_calibrate(const fs::path& config_path, const ash::ConfigOverrides& overrides) {
  const auto config = ash::load_config(config_path, overrides);
  std::cout << ash::calibrate(config).string() << '\n';
  return 0;
}

// Writes the standard benchmark (data, trained bundle) plus a ready-to-run
// experiment.json sweeping every shaping variant.
int cmd_train_demo(const fs::path& dir) {
  const auto spec = ash::standard_benchmark_spec();
  const fs::path data = dir / "data";
  ash::generate_dataset(spec.train, ash::DatasetRole::train, data, "train");
  ash::generate_dataset(spec.id_eval, ash::DatasetRole::id_eval, data, "id_eval");
  ash::generate_dataset(spec.ood_shifted, ash::DatasetRole::ood_eval, data, "ood_shifted");
  ash::generate_dataset(spec.ood_ring, ash::DatasetRole::ood_eval, data, "ood_ring");

  const auto bench = ash::build_benchmark(spec);
  ash::save_bundle(bench.net, dir / "net");

  json config = {
      {"id_train", "data/train.json"},
      {"id_eval", "data/id_eval.json"},
      {"ood_eval", {"data/ood_shifted.json", "data/ood_ring.json"}},
      {"network", "net"},
      {"methods", {"none", "ash-p", "ash-b", "ash-s", "ash-rand"}},
      {"scores", {"energy"}},
      {"sweep", {65, 70, 75, 80, 85, 90}},
      {"threshold_mode", "local"},
      {"out", "reports"},
      {"seed", 0}};
  std::ofstream(dir / "experiment.json") << config.dump(2) << '\n';
  std::cout << (dir / "experiment.json").string() << '\n';
  std::fprintf(stderr, "final training loss %.4f\n", bench.loss_curve.empty() ? 0.0 : bench.loss_curve.back());
  return 0;
}

int cmd_emit_plot(const fs::path& report_path, const std::string& kind, const ash::RowFilter& filter,
                  const std::string& out) {
  std::ifstream in(report_path);
  if (!in) throw ash::Error(ash::Errc::io_error, "cannot open report " + report_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ash::Error(ash::Errc::bad_config, report_path.string() + ": " + e.what());
  }
  const auto csv = ash::emit_plot_data(ash::report_from_json(doc), ash::parse_plot_kind(kind), filter);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw ash::Error(ash::Errc::io_error, "cannot write " + out);
    file << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"activation-shaping OOD detection toolkit"};
  app.require_subcommand(1);

  ash::ConfigOverrides overrides;
  fs::path config_path;

  auto* run = app.add_subcommand("run", "run every configured combination and write a report");
  run->add_option("--config", config_path, "experiment JSON")->required();
  add_overrides(run, overrides);

  auto* calibrate = app.add_subcommand("calibrate", "write global thresholds for the configured p values");
  calibrate->add_option("--config", config_path, "experiment JSON")->required();
  add_overrides(calibrate, overrides);

  fs::path demo_dir = "demo";
  auto* demo = app.add_subcommand("train-demo", "build the standard synthetic benchmark");
  demo->add_option("--out", demo_dir, "output directory");

  ash::SyntheticDatasetSpec data_spec;
  std::string kind = "gaussian-blobs-id";
  std::string role = "train";
  std::string prefix = "data";
  fs::path data_dir = ".";
  auto* gen = app.add_subcommand("gen-data", "write a seeded synthetic dataset");
  gen->add_option("--kind", kind, "gaussian-blobs-id, shifted-blobs-ood or uniform-ring-ood");
  gen->add_option("--role", role, "train, id-eval or ood-eval");
  gen->add_option("--prefix", prefix, "file prefix");
  gen->add_option("--dim", data_spec.dim);
  gen->add_option("--classes", data_spec.classes);
  gen->add_option("--samples-per-class", data_spec.samples_per_class);
  gen->add_option("--spread", data_spec.spread);
  gen->add_option("--center-radius", data_spec.center_radius);
  gen->add_option("--shift", data_spec.shift);
  gen->add_option("--ring-radius", data_spec.ring_radius);
  gen->add_option("--layout-seed", data_spec.layout_seed);
  gen->add_option("--seed", data_spec.seed);
  gen->add_option("--out", data_dir, "output directory");

  fs::path report_path;
  std::string plot_kind;
  std::string plot_out;
  ash::RowFilter filter;
  std::string filter_score;
  auto* plot = app.add_subcommand("emit-plot", "CSV plot data from a report");
  plot->add_option("--report", report_path, "report JSON")->required();
  plot->add_option("--kind", plot_kind, "tradeoff, accuracy-degradation or distributions")->required();
  plot->add_option("--method", filter.method, "row filter: method label");
  plot->add_option("--p", filter.p, "row filter: percentile");
  plot->add_option("--score", filter_score, "row filter: score");
  plot->add_option("--out", plot_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*calibrate) return cmd_calibrate(config_path, overrides);
    if (*demo) return cmd_train_demo(demo_dir);
    if (*gen) {
      data_spec.kind = ash::parse_synthetic_kind(kind);
      const auto manifest = ash::generate_dataset(data_spec, ash::parse_dataset_role(role), data_dir, prefix);
      std::cout << (data_dir / (prefix + ".json")).string() << '\n';
      return manifest.entries.empty() ? kDataError : 0;
    }
    if (*plot) {
      if (!filter_score.empty()) filter.score = ash::parse_score_kind(filter_score);
      return cmd_emit_plot(report_path, plot_kind, filter, plot_out);
    }
  } catch (const ash::Error& e) {
    std::cerr << "ashctl: " << e.what() << '\n';
    return ash::is_config_error(e.code()) ? kConfigError : kDataError;
  } catch (const std::exception& e) {
    std::cerr << "ashctl: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
