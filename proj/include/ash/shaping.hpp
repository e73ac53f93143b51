#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ash/tensor.hpp"

namespace ash {

enum class ShapingMethod { none, ash_p, ash_b, ash_s, ash_rand, react_clip };
enum class ThresholdMode { local, global };
enum class Scaling { exponential, linear };

std::string_view to_string(ShapingMethod method);
std::string_view to_string(ThresholdMode mode);
std::string_view to_string(Scaling scaling);
ShapingMethod parse_shaping_method(std::string_view name);
ThresholdMode parse_threshold_mode(std::string_view name);
Scaling parse_scaling(std::string_view name);

/// True for the percentile-pruning family (ash-p/b/s/rand).
bool uses_percentile(ShapingMethod method);

struct ShapingConfig {
  ShapingMethod method = ShapingMethod::none;
  double p = 0.0;
  ThresholdMode threshold_mode = ThresholdMode::local;
  std::optional<double> global_threshold;
  Scaling scaling = Scaling::exponential;
  double rand_lo = 0.0;
  double rand_hi = 10.0;
  double clip_value = 1.0;
  std::uint64_t seed = 0;

  /// Throws Error(bad_percentile | invalid_argument) on a broken invariant.
  void validate() const;

  friend bool operator==(const ShapingConfig&, const ShapingConfig&) = default;
};

/// Diagnostics of one shaping application. `threshold` is the pruning
/// threshold (the clip bound for react-clip, 0 for none); s1/s2 are the
/// sums before/after pruning; `nonzero` counts nonzeros after pruning.
struct ShapingReport {
  double threshold = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  std::size_t nonzero = 0;
  double factor = 1.0;
  bool degenerate = false;
};

struct Shaped {
  FeatureTensor tensor;
  ShapingReport report;
};

// Every pruning variant zeroes values strictly below the threshold: the
// per-sample nearest-rank percentile in local mode, the calibrated
// global_threshold in global mode. Empty input throws Errc::empty_input.

/// Pruning only; survivors keep their values.
Shaped ash_p(const FeatureTensor& x, const ShapingConfig& cfg);

/// Survivors are all set to s1/n. With no nonzero survivor the output is all
/// zeros and the report is flagged degenerate.
Shaped ash_b(const FeatureTensor& x, const ShapingConfig& cfg);

/// Survivors are multiplied by exp(s1/s2) (or s1/s2 with linear scaling).
/// The factor is evaluated in double and falls back to 1, flagged
/// degenerate, when s2 == 0. Scaled values beyond the float32 range
/// saturate at +/-FLT_MAX, also flagged degenerate.
Shaped ash_s(const FeatureTensor& x, const ShapingConfig& cfg);

/// Survivors are replaced by independent uniform draws from
/// [rand_lo, rand_hi]. Draws come from a counter-based generator keyed by
/// (cfg.seed, sample_index, element index), so results do not depend on
/// evaluation order.
Shaped ash_rand(const FeatureTensor& x, const ShapingConfig& cfg, std::uint64_t sample_index = 0);

/// Elementwise min(x, clip_value).
Shaped react_clip(const FeatureTensor& x, const ShapingConfig& cfg);

/// Dispatches on cfg.method; `none` returns an unchanged copy.
Shaped apply_shaping(const FeatureTensor& x, const ShapingConfig& cfg,
                     std::uint64_t sample_index = 0);

struct ChainResult {
  FeatureTensor tensor;
  std::vector<ShapingReport> reports;
};

/// Applies `chain` left to right. An empty chain is an error.
ChainResult apply_chain(const FeatureTensor& x, std::span<const ShapingConfig> chain,
                        std::uint64_t sample_index = 0);

/// Two-phase global threshold calibration: accumulate activations from the
/// calibration set, then publish the nearest-rank percentile of the pooled
/// scalar multiset.
class ThresholdCalibrator {
 public:
  void add(const FeatureTensor& x);
  double publish(double p) const;

  std::size_t sample_count() const noexcept { return samples_; }

 private:
  std::vector<std::uint32_t> dims_;
  std::vector<float> pooled_;
  std::size_t samples_ = 0;
};

double calibrate_global_threshold(std::span<const FeatureTensor> calibration, double p);

}  // namespace ash
