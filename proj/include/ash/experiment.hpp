#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ash/manifest.hpp"
#include "ash/metrics.hpp"
#include "ash/netlab.hpp"
#include "ash/shaping.hpp"

namespace ash {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

/// Row `p` for treatments without a percentile (none, react-clip alone).
inline constexpr double kNoPercentile = -1.0;

enum class ScoreKind { energy, softmax, knn };

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view name);

/// One treatment: a shaping chain applied at the hook. Percentile steps
/// without an explicit `p` take every value of the experiment sweep.
struct MethodSpec {
  std::string label;
  std::vector<ShapingConfig> chain;
  std::vector<bool> sweep_p;  // per step: p comes from the sweep
};

struct TrainSpec {
  std::vector<std::uint32_t> hidden = {64, 32};
  TrainOptions options;
};

struct ExperimentConfig {
  std::filesystem::path id_train;
  std::filesystem::path id_eval;
  std::vector<std::filesystem::path> ood_eval;
  std::optional<std::filesystem::path> network;  // bundle directory
  std::optional<TrainSpec> train;                // used when no bundle is given
  std::optional<std::string> placement;          // overrides the bundle hook
  std::vector<MethodSpec> methods;
  std::vector<ScoreKind> scores = {ScoreKind::energy};
  double temperature = 1.0;
  std::size_t knn_k = 50;
  bool knn_normalize = true;
  std::vector<double> sweep;
  ThresholdMode threshold_mode = ThresholdMode::local;
  std::optional<std::filesystem::path> global_thresholds;
  std::filesystem::path out = "reports";
  std::uint64_t seed = 0;
  int iou_bins = kDefaultIouBins;

  /// Throws Error(bad_config / bad_percentile) on structural problems.
  void validate() const;
};

/// Parses a config document. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides, applied to the raw config document before parsing.
struct ConfigOverrides {
  std::optional<std::string> method;  // "ash-s" or a chain "react-clip+ash-s"
  std::optional<double> p;            // replaces the sweep and every step p
  std::optional<std::string> score;
  std::optional<std::string> threshold_mode;
  std::optional<double> temperature;
  std::optional<std::string> placement;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

nlohmann::json apply_overrides(nlohmann::json doc, const ConfigOverrides& overrides);
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides);

/// Normalized document with every default filled in; round-trips through
/// parse_config.
nlohmann::json config_to_json(const ExperimentConfig& config);

/// SHA-256 over the normalized config minus output locations.
std::string config_hash(const ExperimentConfig& config);

/// Every percentile used by the config: sweep values plus explicit step p's.
std::vector<double> config_percentiles(const ExperimentConfig& config);

struct ReportRow {
  std::string method;
  double p = kNoPercentile;
  ScoreKind score = ScoreKind::energy;
  MetricReport metrics;
  std::vector<double> id_scores;
  std::vector<double> ood_scores;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string toolkit_version{kToolkitVersion};
  std::string placement;
  ThresholdMode threshold_mode = ThresholdMode::local;
};

struct ExperimentReport {
  Provenance provenance;
  std::vector<ReportRow> rows;
};

/// In-memory inputs of a run.
struct EvalData {
  std::vector<LabeledSample> id_train;
  std::vector<LabeledSample> id_eval;
  std::vector<LabeledSample> ood_eval;
};

/// p -> global threshold for one hook site.
struct GlobalThresholds {
  std::string placement;
  std::map<double, double> by_p;
};

/// Pooled nearest-rank thresholds of the unshaped hook activations of `train`.
GlobalThresholds calibrate_thresholds(const FeedforwardNet& net,
                                      const std::vector<LabeledSample>& train,
                                      const std::vector<double>& percentiles);

nlohmann::json thresholds_to_json(const GlobalThresholds& thresholds);
GlobalThresholds thresholds_from_json(const nlohmann::json& doc);

/// Evaluates every (method, p, score) combination. `net.hook` must already
/// reflect the placement; global mode needs `thresholds` for every p used.
ExperimentReport run_experiment(const ExperimentConfig& config, const FeedforwardNet& net,
                                const EvalData& data,
                                const std::optional<GlobalThresholds>& thresholds = std::nullopt);

/// File-level pipeline: loads manifests, loads or trains the net, calibrates
/// when in global mode, then runs every combination.
ExperimentReport run(const ExperimentConfig& config);

/// Loads or trains the network named by the config, with placement applied.
FeedforwardNet prepare_network(const ExperimentConfig& config, const EvalData& data);

/// Calibrates and writes the threshold map (to config.global_thresholds, or
/// `<out>/global_thresholds.json`). Returns the written path.
std::filesystem::path calibrate(const ExperimentConfig& config);

nlohmann::json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& doc);

/// RFC 4180 table: method,p,score,auroc,aupr,fpr95,id_acc,iou.
std::string report_to_csv(const ExperimentReport& report);

struct WrittenReport {
  std::filesystem::path json;
  std::filesystem::path csv;
};

/// Writes report-NNNN.{json,csv} under `dir` using the first unused index;
/// existing reports are never overwritten.
WrittenReport write_report(const ExperimentReport& report, const std::filesystem::path& dir);

enum class PlotKind { tradeoff, accuracy_degradation, distributions };

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view name);

struct RowFilter {
  std::optional<std::string> method;
  std::optional<double> p;
  std::optional<ScoreKind> score;
};

/// CSV plot data. tradeoff: method,score,p,id_acc,auroc per row;
/// accuracy-degradation: method,score,p,id_acc; distributions: tag,value
/// with one line per raw score of exactly one selected row.
std::string emit_plot_data(const ExperimentReport& report, PlotKind kind,
                           const RowFilter& filter = {});

/// Shortest round-trip decimal form used in CSV output.
std::string format_number(double value);

}  // namespace ash
