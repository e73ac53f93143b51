#include "ash/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ash/error.hpp"
#include "ash/percentile.hpp"

namespace ash {

std::string_view to_string(ShapingMethod method) {
  switch (method) {
    case ShapingMethod::none: return "none";
    case ShapingMethod::ash_p: return "ash-p";
    case ShapingMethod::ash_b: return "ash-b";
    case ShapingMethod::ash_s: return "ash-s";
    case ShapingMethod::ash_rand: return "ash-rand";
    case ShapingMethod::react_clip: return "react-clip";
  }
  return "none";
}

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::local ? "local" : "global";
}

std::string_view to_string(Scaling scaling) {
  return scaling == Scaling::exponential ? "exponential" : "linear";
}

ShapingMethod parse_shaping_method(std::string_view name) {
  for (auto m : {ShapingMethod::none, ShapingMethod::ash_p, ShapingMethod::ash_b,
                 ShapingMethod::ash_s, ShapingMethod::ash_rand, ShapingMethod::react_clip}) {
    if (to_string(m) == name) return m;
  }
  throw Error(Errc::bad_config, "unknown shaping method '" + std::string(name) + "'");
}

ThresholdMode parse_threshold_mode(std::string_view name) {
  if (name == "local") return ThresholdMode::local;
  if (name == "global") return ThresholdMode::global;
  throw Error(Errc::bad_config, "unknown threshold mode '" + std::string(name) + "'");
}

Scaling parse_scaling(std::string_view name) {
  if (name == "exponential") return Scaling::exponential;
  if (name == "linear") return Scaling::linear;
  throw Error(Errc::bad_config, "unknown scaling '" + std::string(name) + "'");
}

bool uses_percentile(ShapingMethod method) {
  return method == ShapingMethod::ash_p || method == ShapingMethod::ash_b ||
         method == ShapingMethod::ash_s || method == ShapingMethod::ash_rand;
}

void ShapingConfig::validate() const {
  check_percentile(p);
  if (threshold_mode == ThresholdMode::global) {
    if (!global_threshold) {
      throw Error(Errc::invalid_argument, "global threshold mode without a published threshold");
    }
    if (!std::isfinite(*global_threshold)) {
      throw Error(Errc::invalid_argument, "global threshold must be finite");
    }
  }
  if (!(rand_lo >= 0.0 && rand_lo <= rand_hi && std::isfinite(rand_hi))) {
    throw Error(Errc::invalid_argument, "rand range must satisfy 0 <= lo <= hi");
  }
  if (method == ShapingMethod::react_clip && !(clip_value > 0.0 && std::isfinite(clip_value))) {
    throw Error(Errc::invalid_argument, "clip value must be positive");
  }
}

namespace {

void expect_method(const ShapingConfig& cfg, ShapingMethod method) {
  if (cfg.method != method) {
    throw Error(Errc::invalid_argument, "config method is " + std::string(to_string(cfg.method)) +
                                            ", expected " + std::string(to_string(method)));
  }
  cfg.validate();
}

double sum(std::span<const float> values) {
  double s = 0.0;
  for (float v : values) s += v;
  return s;
}

struct Pruned {
  std::vector<float> values;
  ShapingReport report;
};

// Shared first half of every pruning variant: threshold, s1, prune, s2, n.
Pruned prune(const FeatureTensor& x, const ShapingConfig& cfg) {
  if (x.empty()) throw Error(Errc::empty_input, "cannot shape an empty tensor");
  Pruned out;
  auto& r = out.report;
  r.threshold = cfg.threshold_mode == ThresholdMode::global ? *cfg.global_threshold
                                                            : percentile_threshold(x, cfg.p);
  r.s1 = sum(x.values());
  out.values.assign(x.values().begin(), x.values().end());
  for (auto& v : out.values) {
    if (v < r.threshold) v = 0.0f;
  }
  r.s2 = sum(out.values);
  r.nonzero = static_cast<std::size_t>(
      std::count_if(out.values.begin(), out.values.end(), [](float v) { return v != 0.0f; }));
  return out;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform on the closed unit interval from the top 53 bits.
double unit_closed(std::uint64_t bits) {
  constexpr double kScale = 1.0 / static_cast<double>((1ULL << 53) - 1);
  return static_cast<double>(bits >> 11) * kScale;
}

}  // namespace

Shaped ash_p(const FeatureTensor& x, const ShapingConfig& cfg) {
  expect_method(cfg, ShapingMethod::ash_p);
  auto pruned = prune(x, cfg);
  return {x.with_values(std::move(pruned.values)), pruned.report};
}

Shaped ash_b(const FeatureTensor& x, const ShapingConfig& cfg) {
  expect_method(cfg, ShapingMethod::ash_b);
  auto pruned = prune(x, cfg);
  auto& r = pruned.report;
  if (r.nonzero == 0) {
    r.degenerate = true;
    std::fill(pruned.values.begin(), pruned.values.end(), 0.0f);
  } else {
    const auto fill = static_cast<float>(r.s1 / static_cast<double>(r.nonzero));
    for (auto& v : pruned.values) {
      if (v != 0.0f) v = fill;
    }
  }
  return {x.with_values(std::move(pruned.values)), r};
}

Shaped ash_s(const FeatureTensor& x, const ShapingConfig& cfg) {
  expect_method(cfg, ShapingMethod::ash_s);
  auto pruned = prune(x, cfg);
  auto& r = pruned.report;
  if (r.s2 == 0.0) {
    r.degenerate = true;
    r.factor = 1.0;
  } else {
    const double ratio = r.s1 / r.s2;
    r.factor = cfg.scaling == Scaling::exponential ? std::exp(ratio) : ratio;
  }
  // Survivors whose scaled value leaves the float32 range saturate at
  // +/-FLT_MAX and flag the report degenerate.
  constexpr double kMax = std::numeric_limits<float>::max();
  for (auto& v : pruned.values) {
    if (v == 0.0f) continue;
    const double scaled = static_cast<double>(v) * r.factor;
    if (!(std::abs(scaled) <= kMax)) {
      r.degenerate = true;
      v = static_cast<float>(std::copysign(kMax, scaled));
    } else {
      v = static_cast<float>(scaled);
    }
  }
  return {x.with_values(std::move(pruned.values)), r};
}

Shaped ash_rand(const FeatureTensor& x, const ShapingConfig& cfg, std::uint64_t sample_index) {
  expect_method(cfg, ShapingMethod::ash_rand);
  auto pruned = prune(x, cfg);
  const std::uint64_t key = splitmix64(cfg.seed ^ splitmix64(sample_index));
  const auto lo = static_cast<float>(cfg.rand_lo);
  const auto hi = static_cast<float>(cfg.rand_hi);
  for (std::size_t i = 0; i < pruned.values.size(); ++i) {
    auto& v = pruned.values[i];
    if (v == 0.0f) continue;
    const double u = unit_closed(splitmix64(key + i));
    const double draw = cfg.rand_lo + u * (cfg.rand_hi - cfg.rand_lo);
    v = std::clamp(static_cast<float>(draw), lo, hi);
  }
  return {x.with_values(std::move(pruned.values)), pruned.report};
}

Shaped react_clip(const FeatureTensor& x, const ShapingConfig& cfg) {
  expect_method(cfg, ShapingMethod::react_clip);
  if (x.empty()) throw Error(Errc::empty_input, "cannot shape an empty tensor");
  ShapingReport r;
  r.threshold = cfg.clip_value;
  r.s1 = sum(x.values());
  std::vector<float> values(x.values().begin(), x.values().end());
  const auto bound = static_cast<float>(cfg.clip_value);
  for (auto& v : values) v = std::min(v, bound);
  r.s2 = sum(values);
  r.nonzero = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](float v) { return v != 0.0f; }));
  return {x.with_values(std::move(values)), r};
}

Shaped apply_shaping(const FeatureTensor& x, const ShapingConfig& cfg,
                     std::uint64_t sample_index) {
  switch (cfg.method) {
    case ShapingMethod::none: {
      if (x.empty()) throw Error(Errc::empty_input, "cannot shape an empty tensor");
      ShapingReport r;
      r.s1 = r.s2 = sum(x.values());
      r.nonzero = static_cast<std::size_t>(std::count_if(
          x.values().begin(), x.values().end(), [](float v) { return v != 0.0f; }));
      return {x, r};
    }
    case ShapingMethod::ash_p: return ash_p(x, cfg);
    case ShapingMethod::ash_b: return ash_b(x, cfg);
    case ShapingMethod::ash_s: return ash_s(x, cfg);
    case ShapingMethod::ash_rand: return ash_rand(x, cfg, sample_index);
    case ShapingMethod::react_clip: return react_clip(x, cfg);
  }
  throw Error(Errc::invalid_argument, "unhandled shaping method");
}

ChainResult apply_chain(const FeatureTensor& x, std::span<const ShapingConfig> chain,
                        std::uint64_t sample_index) {
  if (chain.empty()) throw Error(Errc::invalid_argument, "empty shaping chain");
  ChainResult result{x, {}};
  result.reports.reserve(chain.size());
  for (const auto& cfg : chain) {
    auto step = apply_shaping(result.tensor, cfg, sample_index);
    result.tensor = std::move(step.tensor);
    result.reports.push_back(step.report);
  }
  return result;
}

void ThresholdCalibrator::add(const FeatureTensor& x) {
  if (x.empty()) throw Error(Errc::empty_input, "empty calibration tensor");
  if (samples_ == 0) {
    dims_.assign(x.dims().begin(), x.dims().end());
  } else if (!std::ranges::equal(dims_, x.dims())) {
    throw Error(Errc::dim_mismatch, "calibration tensors must share dims");
  }
  pooled_.insert(pooled_.end(), x.values().begin(), x.values().end());
  ++samples_;
}

double ThresholdCalibrator::publish(double p) const {
  if (samples_ == 0) throw Error(Errc::empty_input, "empty calibration set");
  return percentile_threshold(pooled_, p);
}

double calibrate_global_threshold(std::span<const FeatureTensor> calibration, double p) {
  ThresholdCalibrator calibrator;
  for (const auto& x : calibration) calibrator.add(x);
  return calibrator.publish(p);
}

}  // namespace ash
