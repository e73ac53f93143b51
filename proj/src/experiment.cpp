#include "ash/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "ash/error.hpp"
#include "ash/percentile.hpp"
#include "ash/scoring.hpp"

namespace ash {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::energy: return "energy";
    case ScoreKind::softmax: return "softmax";
    case ScoreKind::knn: return "knn";
  }
  return "energy";
}

ScoreKind parse_score_kind(std::string_view name) {
  for (auto k : {ScoreKind::energy, ScoreKind::softmax, ScoreKind::knn}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::bad_config, "unknown score '" + std::string(name) + "'");
}

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::tradeoff: return "tradeoff";
    case PlotKind::accuracy_degradation: return "accuracy-degradation";
    case PlotKind::distributions: return "distributions";
  }
  return "tradeoff";
}

PlotKind parse_plot_kind(std::string_view name) {
  for (auto k : {PlotKind::tradeoff, PlotKind::accuracy_degradation, PlotKind::distributions}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::bad_config, "unknown plot kind '" + std::string(name) + "'");
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// --- config -----------------------------------------------------------------

namespace {

bool has_sweep_step(const MethodSpec& m) {
  return std::find(m.sweep_p.begin(), m.sweep_p.end(), true) != m.sweep_p.end();
}

std::string default_label(const std::vector<ShapingConfig>& chain) {
  std::string label;
  for (const auto& step : chain) {
    if (!label.empty()) label += '+';
    label += to_string(step.method);
    if (step.method == ShapingMethod::ash_s && step.scaling == Scaling::linear) label += "(linear)";
  }
  return label.empty() ? "none" : label;
}

ShapingConfig parse_step(const json& j, bool& sweep_p) {
  ShapingConfig step;
  step.method = parse_shaping_method(j.at("method").get<std::string>());
  sweep_p = false;
  if (j.contains("p")) {
    step.p = j.at("p").get<double>();
  } else if (uses_percentile(step.method)) {
    sweep_p = true;
  }
  if (j.contains("scaling")) step.scaling = parse_scaling(j.at("scaling").get<std::string>());
  if (j.contains("rand_range")) {
    const auto& r = j.at("rand_range");
    if (!r.is_array() || r.size() != 2) throw Error(Errc::bad_config, "rand_range needs [lo, hi]");
    step.rand_lo = r[0].get<double>();
    step.rand_hi = r[1].get<double>();
  }
  if (j.contains("clip_value")) step.clip_value = j.at("clip_value").get<double>();
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known = {"method", "p", "scaling", "rand_range", "clip_value"};
    if (!known.contains(key)) throw Error(Errc::bad_config, "unknown shaping field '" + key + "'");
  }
  return step;
}

MethodSpec parse_method(const json& j) {
  MethodSpec m;
  auto add = [&m](const json& step_json) {
    bool sweep = false;
    auto step = parse_step(step_json, sweep);
    if (step.method == ShapingMethod::none) return;  // identity; keeps "none" an empty chain
    m.chain.push_back(step);
    m.sweep_p.push_back(sweep);
  };
  if (j.is_string()) {
    add(json{{"method", j.get<std::string>()}});
  } else if (j.contains("chain")) {
    for (const auto& step : j.at("chain")) add(step);
  } else {
    json step = j;
    step.erase("label");
    add(step);
  }
  m.label = j.is_object() && j.contains("label") ? j.at("label").get<std::string>()
                                                 : default_label(m.chain);
  return m;
}

json step_to_json(const ShapingConfig& step, bool sweep_p) {
  json j = {{"method", to_string(step.method)},
            {"scaling", to_string(step.scaling)},
            {"rand_range", {step.rand_lo, step.rand_hi}},
            {"clip_value", step.clip_value}};
  if (!sweep_p) j["p"] = step.p;
  return j;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (id_eval.empty()) throw Error(Errc::bad_config, "id_eval manifest is required");
  if (ood_eval.empty()) throw Error(Errc::bad_config, "ood_eval manifest is required");
  if (!network && !train) throw Error(Errc::bad_config, "need a network bundle or a train spec");
  if (!network && id_train.empty()) throw Error(Errc::bad_config, "training needs id_train");
  if (methods.empty()) throw Error(Errc::bad_config, "no methods");
  if (scores.empty()) throw Error(Errc::bad_config, "no scores");
  if (!(temperature > 0.0)) throw Error(Errc::bad_config, "temperature must be positive");
  if (knn_k == 0) throw Error(Errc::bad_config, "knn k must be positive");
  if (iou_bins < 1) throw Error(Errc::bad_config, "iou_bins must be >= 1");
  if (std::find(scores.begin(), scores.end(), ScoreKind::knn) != scores.end() && id_train.empty()) {
    throw Error(Errc::bad_config, "knn score needs id_train");
  }
  if (threshold_mode == ThresholdMode::global && !global_thresholds && id_train.empty()) {
    throw Error(Errc::bad_config, "global thresholds need id_train or a threshold file");
  }
  if (placement) HookSite::parse(*placement);
  for (double p : sweep) check_percentile(p);
  for (const auto& m : methods) {
    if (m.chain.size() != m.sweep_p.size()) throw Error(Errc::bad_config, "malformed method");
    for (const auto& step : m.chain) {
      ShapingConfig probe = step;
      probe.threshold_mode = ThresholdMode::local;
      probe.validate();
    }
    if (has_sweep_step(m) && sweep.empty()) {
      throw Error(Errc::bad_config, "method '" + m.label + "' needs p or a sweep");
    }
  }
  if (train) {
    if (train->options.batch_size == 0 || !(train->options.lr >= 0.0)) {
      throw Error(Errc::bad_config, "bad train options");
    }
  }
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  ExperimentConfig c;
  try {
    static const std::set<std::string> known = {
        "id_train", "id_eval", "ood_eval", "network", "train", "placement", "methods", "scores",
        "temperature", "knn", "sweep", "threshold_mode", "global_thresholds", "out", "seed",
        "iou_bins"};
    for (const auto& [key, _] : doc.items()) {
      if (!known.contains(key)) throw Error(Errc::bad_config, "unknown config field '" + key + "'");
    }
    if (doc.contains("id_train")) c.id_train = resolve(base_dir, doc.at("id_train").get<std::string>());
    c.id_eval = resolve(base_dir, doc.at("id_eval").get<std::string>());
    const auto& ood = doc.at("ood_eval");
    if (ood.is_string()) {
      c.ood_eval.push_back(resolve(base_dir, ood.get<std::string>()));
    } else {
      for (const auto& o : ood) c.ood_eval.push_back(resolve(base_dir, o.get<std::string>()));
    }
    if (doc.contains("network")) c.network = resolve(base_dir, doc.at("network").get<std::string>());
    if (doc.contains("train")) {
      const auto& t = doc.at("train");
      TrainSpec spec;
      spec.hidden = t.value("hidden", spec.hidden);
      spec.options.epochs = t.value("epochs", spec.options.epochs);
      spec.options.lr = t.value("lr", spec.options.lr);
      spec.options.batch_size = t.value("batch_size", spec.options.batch_size);
      spec.options.freeze_final_bias = t.value("zero_final_bias", spec.options.freeze_final_bias);
      c.train = spec;
    }
    if (doc.contains("placement")) c.placement = doc.at("placement").get<std::string>();
    if (doc.contains("methods")) {
      for (const auto& m : doc.at("methods")) c.methods.push_back(parse_method(m));
    } else {
      c.methods.push_back(parse_method(json("none")));
    }
    if (doc.contains("scores")) {
      c.scores.clear();
      for (const auto& s : doc.at("scores")) c.scores.push_back(parse_score_kind(s.get<std::string>()));
    }
    c.temperature = doc.value("temperature", c.temperature);
    if (doc.contains("knn")) {
      c.knn_k = doc.at("knn").value("k", c.knn_k);
      c.knn_normalize = doc.at("knn").value("normalize", c.knn_normalize);
    }
    c.sweep = doc.value("sweep", c.sweep);
    if (doc.contains("threshold_mode")) {
      c.threshold_mode = parse_threshold_mode(doc.at("threshold_mode").get<std::string>());
    }
    if (doc.contains("global_thresholds")) {
      c.global_thresholds = resolve(base_dir, doc.at("global_thresholds").get<std::string>());
    }
    if (doc.contains("out")) c.out = resolve(base_dir, doc.at("out").get<std::string>());
    else c.out = resolve(base_dir, c.out.string());
    c.seed = doc.value("seed", c.seed);
    c.iou_bins = doc.value("iou_bins", c.iou_bins);
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, e.what());
  }
  c.validate();
  return c;
}

json apply_overrides(json doc, const ConfigOverrides& o) {
  if (!doc.is_object()) throw Error(Errc::bad_config, "config must be a JSON object");
  if (o.method) {
    json chain = json::array();
    std::string_view rest = *o.method;
    while (true) {
      const auto plus = rest.find('+');
      chain.push_back({{"method", std::string(rest.substr(0, plus))}});
      if (plus == std::string_view::npos) break;
      rest.remove_prefix(plus + 1);
    }
    doc["methods"] = json::array({{{"chain", chain}}});
  }
  if (o.p) {
    doc["sweep"] = json::array({*o.p});
    if (doc.contains("methods")) {
      for (auto& m : doc["methods"]) {
        if (m.is_object() && m.contains("chain")) {
          for (auto& step : m["chain"]) step.erase("p");
        } else if (m.is_object()) {
          m.erase("p");
        }
      }
    }
  }
  if (o.score) doc["scores"] = json::array({*o.score});
  if (o.threshold_mode) doc["threshold_mode"] = *o.threshold_mode;
  if (o.temperature) doc["temperature"] = *o.temperature;
  if (o.placement) doc["placement"] = *o.placement;
  if (o.seed) doc["seed"] = *o.seed;
  if (o.out) doc["out"] = fs::absolute(*o.out).generic_string();
  return doc;
}

ExperimentConfig load_config(const fs::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::bad_config, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, path.string() + ": " + e.what());
  }
  return parse_config(apply_overrides(std::move(doc), overrides), path.parent_path());
}

ExperimentConfig load_config(const fs::path& path) { return load_config(path, {}); }

json config_to_json(const ExperimentConfig& c) {
  json doc;
  if (!c.id_train.empty()) doc["id_train"] = c.id_train.generic_string();
  doc["id_eval"] = c.id_eval.generic_string();
  doc["ood_eval"] = json::array();
  for (const auto& o : c.ood_eval) doc["ood_eval"].push_back(o.generic_string());
  if (c.network) doc["network"] = c.network->generic_string();
  if (c.train) {
    doc["train"] = {{"hidden", c.train->hidden},
                    {"epochs", c.train->options.epochs},
                    {"lr", c.train->options.lr},
                    {"batch_size", c.train->options.batch_size},
                    {"zero_final_bias", c.train->options.freeze_final_bias}};
  }
  if (c.placement) doc["placement"] = *c.placement;
  doc["methods"] = json::array();
  for (const auto& m : c.methods) {
    json chain = json::array();
    for (std::size_t i = 0; i < m.chain.size(); ++i) chain.push_back(step_to_json(m.chain[i], m.sweep_p[i]));
    doc["methods"].push_back({{"label", m.label}, {"chain", std::move(chain)}});
  }
  doc["scores"] = json::array();
  for (auto s : c.scores) doc["scores"].push_back(to_string(s));
  doc["temperature"] = c.temperature;
  doc["knn"] = {{"k", c.knn_k}, {"normalize", c.knn_normalize}};
  doc["sweep"] = c.sweep;
  doc["threshold_mode"] = to_string(c.threshold_mode);
  if (c.global_thresholds) doc["global_thresholds"] = c.global_thresholds->generic_string();
  doc["out"] = c.out.generic_string();
  doc["seed"] = c.seed;
  doc["iou_bins"] = c.iou_bins;
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  json doc = config_to_json(config);
  doc.erase("out");
  const std::string canonical = doc.dump();

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::invalid_argument, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::vector<double> config_percentiles(const ExperimentConfig& config) {
  std::set<double> ps(config.sweep.begin(), config.sweep.end());
  for (const auto& m : config.methods) {
    for (std::size_t i = 0; i < m.chain.size(); ++i) {
      if (uses_percentile(m.chain[i].method) && !m.sweep_p[i]) ps.insert(m.chain[i].p);
    }
  }
  return {ps.begin(), ps.end()};
}

// --- thresholds ------------------------------------------------------------

GlobalThresholds calibrate_thresholds(const FeedforwardNet& net,
                                      const std::vector<LabeledSample>& train,
                                      const std::vector<double>& percentiles) {
  if (train.empty()) throw Error(Errc::empty_input, "empty training manifest");
  ThresholdCalibrator calibrator;
  for (const auto& s : train) calibrator.add(hook_activation(net, s.x));
  GlobalThresholds out;
  out.placement = net.hook.name();
  for (double p : percentiles) out.by_p[p] = calibrator.publish(p);
  return out;
}

json thresholds_to_json(const GlobalThresholds& thresholds) {
  json map = json::object();
  for (const auto& [p, t] : thresholds.by_p) map[format_number(p)] = t;
  return {{"placement", thresholds.placement}, {"thresholds", std::move(map)}};
}

GlobalThresholds thresholds_from_json(const json& doc) {
  GlobalThresholds out;
  try {
    out.placement = doc.at("placement").get<std::string>();
    for (const auto& [key, value] : doc.at("thresholds").items()) {
      char* end = nullptr;
      const double p = std::strtod(key.c_str(), &end);
      if (end == key.c_str() || *end != '\0') throw Error(Errc::bad_config, "bad percentile key " + key);
      out.by_p[p] = value.get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, e.what());
  }
  return out;
}

// --- run ---------------------------------------------------------------------

namespace {

struct Forwarded {
  std::vector<std::vector<double>> logits;
  std::vector<FeatureTensor> features;
};

Forwarded forward_all(const FeedforwardNet& net, const std::vector<LabeledSample>& samples,
                      const std::vector<ShapingConfig>& chain) {
  Forwarded out;
  out.logits.reserve(samples.size());
  out.features.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto r = forward(net, samples[i].x, chain, i);
    out.logits.push_back(std::move(r.logits));
    out.features.push_back(std::move(r.penultimate));
  }
  return out;
}

std::vector<ShapingConfig> instantiate(const ExperimentConfig& config, const MethodSpec& m,
                                       double sweep_value,
                                       const std::optional<GlobalThresholds>& thresholds) {
  std::vector<ShapingConfig> chain = m.chain;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto& step = chain[i];
    if (m.sweep_p[i]) step.p = sweep_value;
    step.seed = config.seed;
    if (config.threshold_mode == ThresholdMode::global && uses_percentile(step.method)) {
      if (!thresholds || !thresholds->by_p.contains(step.p)) {
        throw Error(Errc::bad_config, "no global threshold for p=" + format_number(step.p));
      }
      step.threshold_mode = ThresholdMode::global;
      step.global_threshold = thresholds->by_p.at(step.p);
    }
  }
  return chain;
}

double row_percentile(const MethodSpec& m, double sweep_value) {
  if (has_sweep_step(m)) return sweep_value;
  for (const auto& step : m.chain) {
    if (uses_percentile(step.method)) return step.p;
  }
  return kNoPercentile;
}

std::vector<double> score_all(ScoreKind kind, const ExperimentConfig& config,
                              const Forwarded& fw, const KnnIndex* knn) {
  std::vector<double> scores;
  scores.reserve(fw.logits.size());
  for (std::size_t i = 0; i < fw.logits.size(); ++i) {
    switch (kind) {
      case ScoreKind::energy: scores.push_back(energy_score(fw.logits[i])); break;
      case ScoreKind::softmax: scores.push_back(softmax_score(fw.logits[i], config.temperature)); break;
      case ScoreKind::knn: scores.push_back(knn->score(fw.features[i])); break;
    }
  }
  return scores;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, const FeedforwardNet& net,
                                const EvalData& data,
                                const std::optional<GlobalThresholds>& thresholds) {
  config.validate();
  net.validate();
  if (data.id_eval.empty()) throw Error(Errc::empty_input, "empty id_eval set");
  if (data.ood_eval.empty()) throw Error(Errc::empty_input, "empty ood_eval set");
  const bool want_knn =
      std::find(config.scores.begin(), config.scores.end(), ScoreKind::knn) != config.scores.end();

  ExperimentReport report;
  report.provenance.config_hash = config_hash(config);
  report.provenance.seed = config.seed;
  report.provenance.placement = net.hook.name();
  report.provenance.threshold_mode = config.threshold_mode;

  for (const auto& method : config.methods) {
    const std::vector<double> values =
        has_sweep_step(method) ? config.sweep : std::vector<double>{kNoPercentile};
    for (double value : values) {
      const auto chain = instantiate(config, method, value, thresholds);
      const auto id = forward_all(net, data.id_eval, chain);
      const auto ood = forward_all(net, data.ood_eval, chain);

      std::vector<int> predictions;
      std::vector<int> labels;
      for (std::size_t i = 0; i < data.id_eval.size(); ++i) {
        if (data.id_eval[i].label < 0) continue;
        predictions.push_back(static_cast<int>(argmax(id.logits[i])));
        labels.push_back(data.id_eval[i].label);
      }
      std::optional<double> accuracy;
      if (!labels.empty()) accuracy = id_accuracy(predictions, labels);

      std::optional<KnnIndex> knn;
      if (want_knn) {
        auto bank = forward_all(net, data.id_train, chain).features;
        if (config.knn_normalize) {
          // all-zero features have no direction; they cannot sit in a unit-norm bank
          std::erase_if(bank, [](const FeatureTensor& f) {
            return std::all_of(f.values().begin(), f.values().end(), [](float v) { return v == 0.0f; });
          });
        }
        knn = KnnIndex::fit(bank, config.knn_k, config.knn_normalize);
      }

      for (auto kind : config.scores) {
        ReportRow row;
        row.method = method.label;
        row.p = row_percentile(method, value);
        row.score = kind;
        const KnnIndex* index = knn ? &*knn : nullptr;
        ScoreSet set{score_all(kind, config, id, index), score_all(kind, config, ood, index)};
        row.metrics = evaluate_scores(set, config.iou_bins);
        row.metrics.id_accuracy = accuracy;
        row.id_scores = std::move(set.id);
        row.ood_scores = std::move(set.ood);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

namespace {

std::vector<LabeledSample> load_set(const fs::path& manifest_path) {
  return load_samples(load_manifest(manifest_path));
}

void check_width(const std::vector<LabeledSample>& samples, const FeedforwardNet& net,
                 const fs::path& source) {
  for (const auto& s : samples) {
    if (s.x.size() != net.input_dim()) {
      throw Error(Errc::dim_mismatch, source.string() + ": samples have " +
                                          std::to_string(s.x.size()) + " elements, network expects " +
                                          std::to_string(net.input_dim()));
    }
  }
}

EvalData load_eval_data(const ExperimentConfig& config) {
  EvalData data;
  if (!config.id_train.empty()) data.id_train = load_set(config.id_train);
  data.id_eval = load_set(config.id_eval);
  for (const auto& path : config.ood_eval) {
    auto part = load_set(path);
    data.ood_eval.insert(data.ood_eval.end(), std::make_move_iterator(part.begin()),
                         std::make_move_iterator(part.end()));
  }
  return data;
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

FeedforwardNet prepare_network(const ExperimentConfig& config, const EvalData& data) {
  FeedforwardNet net;
  if (config.network) {
    net = load_bundle(*config.network);
  } else {
    if (data.id_train.empty()) throw Error(Errc::empty_input, "empty training manifest");
    int max_label = -1;
    for (const auto& s : data.id_train) max_label = std::max(max_label, s.label);
    if (max_label < 1) throw Error(Errc::invalid_argument, "training data needs two classes");
    std::vector<std::uint32_t> widths = {static_cast<std::uint32_t>(data.id_train.front().x.size())};
    widths.insert(widths.end(), config.train->hidden.begin(), config.train->hidden.end());
    widths.push_back(static_cast<std::uint32_t>(max_label + 1));
    net = FeedforwardNet::create(widths, config.seed);
    auto options = config.train->options;
    options.seed = config.seed + 1;
    train(net, data.id_train, options);
  }
  if (config.placement) {
    net.hook = HookSite::parse(*config.placement);
    try {
      net.validate();
    } catch (const Error& e) {
      throw Error(Errc::bad_config, e.detail());
    }
  }
  return net;
}

ExperimentReport run(const ExperimentConfig& config) {
  config.validate();
  const auto data = load_eval_data(config);
  const auto net = prepare_network(config, data);
  if (!config.id_train.empty()) check_width(data.id_train, net, config.id_train);
  check_width(data.id_eval, net, config.id_eval);
  for (const auto& path : config.ood_eval) check_width(load_set(path), net, path);

  std::optional<GlobalThresholds> thresholds;
  if (config.threshold_mode == ThresholdMode::global) {
    if (config.global_thresholds && fs::exists(*config.global_thresholds)) {
      std::ifstream in(*config.global_thresholds);
      try {
        thresholds = thresholds_from_json(json::parse(in));
      } catch (const json::exception& e) {
        throw Error(Errc::bad_config, config.global_thresholds->string() + ": " + e.what());
      }
      if (thresholds->placement != net.hook.name()) {
        throw Error(Errc::bad_config, "thresholds were calibrated for " + thresholds->placement);
      }
    } else {
      thresholds = calibrate_thresholds(net, data.id_train, config_percentiles(config));
    }
  }
  return run_experiment(config, net, data, thresholds);
}

fs::path calibrate(const ExperimentConfig& config) {
  config.validate();
  if (config.id_train.empty()) throw Error(Errc::bad_config, "calibration needs id_train");
  const auto percentiles = config_percentiles(config);
  if (percentiles.empty()) throw Error(Errc::bad_config, "no percentiles to calibrate");
  EvalData data;
  data.id_train = load_set(config.id_train);
  if (data.id_train.empty()) throw Error(Errc::empty_input, "empty training manifest " + config.id_train.string());
  const auto net = prepare_network(config, data);
  check_width(data.id_train, net, config.id_train);
  const auto thresholds = calibrate_thresholds(net, data.id_train, percentiles);
  const fs::path path = config.global_thresholds.value_or(config.out / "global_thresholds.json");
  write_json(path, thresholds_to_json(thresholds));
  return path;
}

// --- reports -------------------------------------------------------------------

json report_to_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"method", r.method},
                    {"p", r.p},
                    {"score", to_string(r.score)},
                    {"auroc", r.metrics.auroc},
                    {"aupr", r.metrics.aupr},
                    {"fpr95", r.metrics.fpr95},
                    {"id_acc", r.metrics.id_accuracy ? json(*r.metrics.id_accuracy) : json(nullptr)},
                    {"iou", r.metrics.iou ? json(*r.metrics.iou) : json(nullptr)},
                    {"n_id", r.metrics.id_count},
                    {"n_ood", r.metrics.ood_count},
                    {"id_scores", r.id_scores},
                    {"ood_scores", r.ood_scores}});
  }
  const auto& p = report.provenance;
  return {{"provenance",
           {{"config_hash", p.config_hash},
            {"seed", p.seed},
            {"toolkit_version", p.toolkit_version},
            {"placement", p.placement},
            {"threshold_mode", to_string(p.threshold_mode)}}},
          {"rows", std::move(rows)}};
}

ExperimentReport report_from_json(const json& doc) {
  ExperimentReport report;
  try {
    const auto& p = doc.at("provenance");
    report.provenance.config_hash = p.at("config_hash").get<std::string>();
    report.provenance.seed = p.at("seed").get<std::uint64_t>();
    report.provenance.toolkit_version = p.at("toolkit_version").get<std::string>();
    report.provenance.placement = p.value("placement", std::string());
    report.provenance.threshold_mode =
        parse_threshold_mode(p.value("threshold_mode", std::string("local")));
    for (const auto& r : doc.at("rows")) {
      ReportRow row;
      row.method = r.at("method").get<std::string>();
      row.p = r.at("p").get<double>();
      row.score = parse_score_kind(r.at("score").get<std::string>());
      row.metrics.auroc = r.at("auroc").get<double>();
      row.metrics.aupr = r.at("aupr").get<double>();
      row.metrics.fpr95 = r.at("fpr95").get<double>();
      if (!r.at("id_acc").is_null()) row.metrics.id_accuracy = r.at("id_acc").get<double>();
      if (!r.at("iou").is_null()) row.metrics.iou = r.at("iou").get<double>();
      row.metrics.id_count = r.at("n_id").get<std::size_t>();
      row.metrics.ood_count = r.at("n_ood").get<std::size_t>();
      row.id_scores = r.value("id_scores", std::vector<double>{});
      row.ood_scores = r.value("ood_scores", std::vector<double>{});
      report.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, std::string("malformed report: ") + e.what());
  }
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

void csv_line(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    out += csv_field(f);
    first = false;
  }
  out += "\r\n";
}

std::vector<const ReportRow*> select_rows(const ExperimentReport& report, const RowFilter& filter) {
  std::vector<const ReportRow*> rows;
  for (const auto& r : report.rows) {
    if (filter.method && r.method != *filter.method) continue;
    if (filter.p && r.p != *filter.p) continue;
    if (filter.score && r.score != *filter.score) continue;
    rows.push_back(&r);
  }
  return rows;
}

}  // namespace

std::string report_to_csv(const ExperimentReport& report) {
  std::string out;
  csv_line(out, {"method", "p", "score", "auroc", "aupr", "fpr95", "id_acc", "iou"});
  for (const auto& r : report.rows) {
    csv_line(out, {r.method, format_number(r.p), std::string(to_string(r.score)),
                   format_number(r.metrics.auroc), format_number(r.metrics.aupr),
                   format_number(r.metrics.fpr95), optional_number(r.metrics.id_accuracy),
                   optional_number(r.metrics.iou)});
  }
  return out;
}

WrittenReport write_report(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  for (int index = 1; index < 100000; ++index) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "report-%04d", index);
    WrittenReport w{dir / (std::string(stem) + ".json"), dir / (std::string(stem) + ".csv")};
    if (fs::exists(w.json) || fs::exists(w.csv)) continue;
    write_json(w.json, report_to_json(report));
    std::ofstream csv(w.csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(Errc::io_error, "cannot write " + w.csv.string());
    csv << report_to_csv(report);
    return w;
  }
  throw Error(Errc::io_error, "no free report slot in " + dir.string());
}

std::string emit_plot_data(const ExperimentReport& report, PlotKind kind, const RowFilter& filter) {
  const auto rows = select_rows(report, filter);
  if (rows.empty()) throw Error(Errc::bad_config, "missing rows: no report row matches the selection");
  std::string out;
  switch (kind) {
    case PlotKind::tradeoff:
    case PlotKind::accuracy_degradation: {
      const bool tradeoff = kind == PlotKind::tradeoff;
      if (tradeoff) csv_line(out, {"method", "score", "p", "id_acc", "auroc"});
      else csv_line(out, {"method", "score", "p", "id_acc"});
      for (const auto* r : rows) {
        if (!r->metrics.id_accuracy) {
          throw Error(Errc::bad_config, "missing rows: row '" + r->method + "' has no ID accuracy");
        }
        const std::string acc = format_number(*r->metrics.id_accuracy);
        const std::string score(to_string(r->score));
        if (tradeoff) csv_line(out, {r->method, score, format_number(r->p), acc, format_number(r->metrics.auroc)});
        else csv_line(out, {r->method, score, format_number(r->p), acc});
      }
      break;
    }
    case PlotKind::distributions: {
      if (rows.size() != 1) {
        throw Error(Errc::bad_config, "distributions need exactly one row, selection matches " +
                                          std::to_string(rows.size()));
      }
      csv_line(out, {"tag", "value"});
      for (double v : rows.front()->id_scores) csv_line(out, {"id", format_number(v)});
      for (double v : rows.front()->ood_scores) csv_line(out, {"ood", format_number(v)});
      break;
    }
  }
  return out;
}

}  // namespace ash
