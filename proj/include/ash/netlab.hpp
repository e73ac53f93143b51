#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ash/manifest.hpp"
#include "ash/shaping.hpp"
#include "ash/tensor.hpp"

namespace ash {

struct DenseLayer {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  std::vector<float> weight;  // out x in, row-major
  std::vector<float> bias;    // out
};

/// Where a shaping chain attaches. `pre-relu[i]` is the output of affine
/// layer i before its ReLU; `penultimate` is the input of the final affine
/// layer (after the last ReLU).
struct HookSite {
  enum class Kind { pre_relu, penultimate };

  Kind kind = Kind::penultimate;
  std::size_t layer = 0;

  static HookSite penultimate() { return {}; }
  static HookSite pre_relu(std::size_t layer) { return {Kind::pre_relu, layer}; }
  static HookSite parse(std::string_view name);
  std::string name() const;

  friend bool operator==(const HookSite&, const HookSite&) = default;
};

/// Affine layers with ReLU between consecutive layers and none after the last.
struct FeedforwardNet {
  std::vector<DenseLayer> layers;
  HookSite hook;

  /// widths = {input, hidden..., classes}. He-normal weights, zero biases.
  static FeedforwardNet create(std::span<const std::uint32_t> widths, std::uint64_t seed);

  /// Throws Error(invalid_argument) unless dims chain and the hook exists.
  void validate() const;

  std::size_t input_dim() const { return layers.front().in; }
  std::size_t num_classes() const { return layers.back().out; }
  std::vector<HookSite> hook_sites() const;
};

struct ForwardResult {
  std::vector<double> logits;
  /// Input of the final affine layer, after any shaping at the hook.
  FeatureTensor penultimate;
  std::vector<ShapingReport> reports;
};

/// Forward pass. A non-empty `chain` is applied at `net.hook` and the shaped
/// activation continues through the rest of the network. Hidden activations
/// are stored as float32; affine sums and the logits are double.
ForwardResult forward(const FeedforwardNet& net, const FeatureTensor& x,
                      std::span<const ShapingConfig> chain = {}, std::uint64_t sample_index = 0);

/// Unshaped activation at `net.hook`, as seen by the chain during forward().
FeatureTensor hook_activation(const FeedforwardNet& net, const FeatureTensor& x);

std::size_t argmax(std::span<const double> values);

struct TrainOptions {
  std::size_t epochs = 50;
  double lr = 0.05;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  /// Keep the final layer's bias at zero throughout training.
  bool freeze_final_bias = false;
};

struct LossGradients {
  double loss = 0.0;
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> bias;
};

/// Mean softmax cross-entropy over `batch` and its analytic gradients.
LossGradients loss_and_gradients(const FeedforwardNet& net, std::span<const LabeledSample> batch);

/// Plain mini-batch SGD on softmax cross-entropy. Returns the mean training
/// loss of each epoch. Deterministic for a given seed.
std::vector<double> train(FeedforwardNet& net, std::span<const LabeledSample> data,
                          const TrainOptions& options);

/// Bundle directory: arch.json plus one ASHT file per weight and bias.
void save_bundle(const FeedforwardNet& net, const std::filesystem::path& dir);
FeedforwardNet load_bundle(const std::filesystem::path& dir);

}  // namespace ash
