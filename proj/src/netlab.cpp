#include "ash/netlab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <random>

#include "ash/error.hpp"
#include "ash/tensor_io.hpp"

namespace ash {

using nlohmann::json;

HookSite HookSite::parse(std::string_view name) {
  if (name == "penultimate") return penultimate();
  constexpr std::string_view prefix = "pre-relu[";
  if (name.starts_with(prefix) && name.ends_with("]") && name.size() > prefix.size() + 1) {
    const auto digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return pre_relu(std::stoul(std::string(digits)));
    }
  }
  throw Error(Errc::bad_config, "unknown hook placement '" + std::string(name) + "'");
}

std::string HookSite::name() const {
  if (kind == Kind::penultimate) return "penultimate";
  return "pre-relu[" + std::to_string(layer) + "]";
}

FeedforwardNet FeedforwardNet::create(std::span<const std::uint32_t> widths, std::uint64_t seed) {
  if (widths.size() < 2) throw Error(Errc::invalid_argument, "need input and output widths");
  std::mt19937_64 rng(seed);
  FeedforwardNet net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    std::normal_distribution<double> init(0.0, std::sqrt(2.0 / layer.in));
    layer.weight.resize(std::size_t{layer.in} * layer.out);
    for (auto& w : layer.weight) w = static_cast<float>(init(rng));
    layer.bias.assign(layer.out, 0.0f);
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

void FeedforwardNet::validate() const {
  if (layers.empty()) throw Error(Errc::invalid_argument, "network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.in == 0 || layer.out == 0) throw Error(Errc::invalid_argument, "zero-width layer");
    if (layer.weight.size() != std::size_t{layer.in} * layer.out ||
        layer.bias.size() != layer.out) {
      throw Error(Errc::invalid_argument, "layer " + std::to_string(l) + " parameter sizes");
    }
    if (l > 0 && layers[l - 1].out != layer.in) {
      throw Error(Errc::invalid_argument, "layer " + std::to_string(l) + " input width");
    }
  }
  if (num_classes() < 2) throw Error(Errc::invalid_argument, "need at least two classes");
  if (hook.kind == HookSite::Kind::pre_relu && hook.layer + 1 >= layers.size()) {
    throw Error(Errc::invalid_argument, "no hook site " + hook.name());
  }
}

std::vector<HookSite> FeedforwardNet::hook_sites() const {
  std::vector<HookSite> sites;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) sites.push_back(HookSite::pre_relu(l));
  sites.push_back(HookSite::penultimate());
  return sites;
}

namespace {

template <typename T>
std::vector<double> affine(const DenseLayer& layer, std::span<const T> a) {
  std::vector<double> z(layer.out);
  for (std::size_t o = 0; o < layer.out; ++o) {
    const float* row = layer.weight.data() + o * layer.in;
    double acc = layer.bias[o];
    for (std::size_t i = 0; i < layer.in; ++i) acc += static_cast<double>(row[i]) * a[i];
    z[o] = acc;
  }
  return z;
}

std::vector<float> to_float(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

void relu(std::vector<float>& a) {
  for (auto& v : a) v = std::max(v, 0.0f);
}

struct Pass {
  std::vector<double> logits;
  FeatureTensor penultimate;
  std::vector<ShapingReport> reports;
  FeatureTensor raw_hook;
};

Pass run(const FeedforwardNet& net, const FeatureTensor& x, std::span<const ShapingConfig> chain,
         std::uint64_t sample_index, bool stop_at_hook) {
  net.validate();
  if (x.size() != net.input_dim()) {
    throw Error(Errc::dim_mismatch, "input has " + std::to_string(x.size()) +
                                        " elements, network expects " +
                                        std::to_string(net.input_dim()));
  }
  Pass pass;
  const std::size_t last = net.layers.size() - 1;
  auto shape_at_hook = [&](FeatureTensor t) -> FeatureTensor {
    if (stop_at_hook) {
      pass.raw_hook = std::move(t);
      return {};
    }
    if (chain.empty()) return t;
    auto shaped = apply_chain(t, chain, sample_index);
    pass.reports = std::move(shaped.reports);
    return std::move(shaped.tensor);
  };

  FeatureTensor a(std::vector<float>(x.values().begin(), x.values().end()));
  for (std::size_t l = 0; l <= last; ++l) {
    if (l == last) {
      if (net.hook.kind == HookSite::Kind::penultimate) {
        a = shape_at_hook(std::move(a));
        if (stop_at_hook) return pass;
      }
      pass.logits = affine(net.layers[l], a.values());
      pass.penultimate = std::move(a);
      return pass;
    }
    FeatureTensor z(to_float(affine(net.layers[l], a.values())));
    if (net.hook.kind == HookSite::Kind::pre_relu && net.hook.layer == l) {
      z = shape_at_hook(std::move(z));
      if (stop_at_hook) return pass;
    }
    std::vector<float> next(z.values().begin(), z.values().end());
    relu(next);
    a = FeatureTensor(std::move(next));
  }
  return pass;
}

}  // namespace

ForwardResult forward(const FeedforwardNet& net, const FeatureTensor& x,
                      std::span<const ShapingConfig> chain, std::uint64_t sample_index) {
  auto pass = run(net, x, chain, sample_index, false);
  return {std::move(pass.logits), std::move(pass.penultimate), std::move(pass.reports)};
}

FeatureTensor hook_activation(const FeedforwardNet& net, const FeatureTensor& x) {
  return run(net, x, {}, 0, true).raw_hook;
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(
      std::distance(values.begin(), std::max_element(values.begin(), values.end())));
}

LossGradients loss_and_gradients(const FeedforwardNet& net, std::span<const LabeledSample> batch) {
  net.validate();
  if (batch.empty()) throw Error(Errc::empty_input, "empty batch");
  const std::size_t depth = net.layers.size();
  LossGradients g;
  g.weight.resize(depth);
  g.bias.resize(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    g.weight[l].assign(net.layers[l].weight.size(), 0.0);
    g.bias[l].assign(net.layers[l].out, 0.0);
  }

  std::vector<std::vector<double>> acts(depth + 1);  // acts[l] feeds layer l
  std::vector<std::vector<double>> pre(depth);
  for (const auto& sample : batch) {
    if (sample.x.size() != net.input_dim()) {
      throw Error(Errc::dim_mismatch, "training sample width");
    }
    if (sample.label < 0 || static_cast<std::size_t>(sample.label) >= net.num_classes()) {
      throw Error(Errc::invalid_argument, "label " + std::to_string(sample.label) +
                                              " outside [0, classes)");
    }
    acts[0].assign(sample.x.values().begin(), sample.x.values().end());
    for (std::size_t l = 0; l < depth; ++l) {
      pre[l] = affine<double>(net.layers[l], acts[l]);
      acts[l + 1] = pre[l];
      if (l + 1 < depth) {
        for (auto& v : acts[l + 1]) v = std::max(v, 0.0);
      }
    }

    // Softmax cross-entropy; delta = softmax - onehot.
    const auto& z = pre[depth - 1];
    const double m = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double v : z) denom += std::exp(v - m);
    const double log_norm = m + std::log(denom);
    g.loss += log_norm - z[static_cast<std::size_t>(sample.label)];

    std::vector<double> delta(z.size());
    for (std::size_t c = 0; c < z.size(); ++c) delta[c] = std::exp(z[c] - log_norm);
    delta[static_cast<std::size_t>(sample.label)] -= 1.0;

    for (std::size_t l = depth; l-- > 0;) {
      const auto& layer = net.layers[l];
      const auto& input = acts[l];
      for (std::size_t o = 0; o < layer.out; ++o) {
        g.bias[l][o] += delta[o];
        double* row = g.weight[l].data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) row[i] += delta[o] * input[i];
      }
      if (l == 0) break;
      std::vector<double> back(layer.in, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        const float* row = layer.weight.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) back[i] += static_cast<double>(row[i]) * delta[o];
      }
      for (std::size_t i = 0; i < layer.in; ++i) {
        if (pre[l - 1][i] <= 0.0) back[i] = 0.0;
      }
      delta = std::move(back);
    }
  }

  const auto n = static_cast<double>(batch.size());
  g.loss /= n;
  for (std::size_t l = 0; l < depth; ++l) {
    for (auto& v : g.weight[l]) v /= n;
    for (auto& v : g.bias[l]) v /= n;
  }
  return g;
}

std::vector<double> train(FeedforwardNet& net, std::span<const LabeledSample> data,
                          const TrainOptions& options) {
  if (data.empty()) throw Error(Errc::empty_input, "empty training set");
  if (options.batch_size == 0) throw Error(Errc::invalid_argument, "batch size must be positive");
  net.validate();
  if (options.freeze_final_bias) {
    std::fill(net.layers.back().bias.begin(), net.layers.back().bias.end(), 0.0f);
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> curve;
  curve.reserve(options.epochs);
  std::vector<LabeledSample> batch;
  const std::size_t last = net.layers.size() - 1;

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      const auto g = loss_and_gradients(net, batch);
      epoch_loss += g.loss * static_cast<double>(batch.size());
      for (std::size_t l = 0; l <= last; ++l) {
        auto& layer = net.layers[l];
        for (std::size_t i = 0; i < layer.weight.size(); ++i) {
          layer.weight[i] = static_cast<float>(layer.weight[i] - options.lr * g.weight[l][i]);
        }
        if (l == last && options.freeze_final_bias) continue;
        for (std::size_t i = 0; i < layer.bias.size(); ++i) {
          layer.bias[i] = static_cast<float>(layer.bias[i] - options.lr * g.bias[l][i]);
        }
      }
    }
    curve.push_back(epoch_loss / static_cast<double>(data.size()));
  }
  return curve;
}

void save_bundle(const FeedforwardNet& net, const std::filesystem::path& dir) {
  net.validate();
  std::filesystem::create_directories(dir);
  json layers = json::array();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const std::string weight = "layer" + std::to_string(l) + "_weight.asht";
    const std::string bias = "layer" + std::to_string(l) + "_bias.asht";
    write_tensor(FeatureTensor({layer.out, layer.in}, layer.weight), dir / weight);
    write_tensor(FeatureTensor({layer.out}, layer.bias), dir / bias);
    layers.push_back({{"in", layer.in}, {"out", layer.out}, {"weight", weight}, {"bias", bias}});
  }
  json sites = json::array();
  for (const auto& s : net.hook_sites()) sites.push_back(s.name());
  const json arch = {{"format", "ash-net"},
                     {"version", 1},
                     {"layers", std::move(layers)},
                     {"hook", net.hook.name()},
                     {"hook_sites", std::move(sites)}};
  std::ofstream out(dir / "arch.json", std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + (dir / "arch.json").string());
  out << arch.dump(2) << '\n';
}

FeedforwardNet load_bundle(const std::filesystem::path& dir) {
  const auto arch_path = dir / "arch.json";
  std::ifstream in(arch_path);
  if (!in) throw Error(Errc::io_error, "cannot open " + arch_path.string());
  FeedforwardNet net;
  try {
    const json arch = json::parse(in);
    for (const auto& entry : arch.at("layers")) {
      DenseLayer layer;
      layer.in = entry.at("in").get<std::uint32_t>();
      layer.out = entry.at("out").get<std::uint32_t>();
      const auto weight_path = dir / entry.at("weight").get<std::string>();
      const auto bias_path = dir / entry.at("bias").get<std::string>();
      const auto w = read_tensor(weight_path);
      const auto b = read_tensor(bias_path);
      if (w.size() != std::size_t{layer.in} * layer.out) {
        throw Error(Errc::dim_mismatch, weight_path.string());
      }
      if (b.size() != layer.out) throw Error(Errc::dim_mismatch, bias_path.string());
      layer.weight.assign(w.values().begin(), w.values().end());
      layer.bias.assign(b.values().begin(), b.values().end());
      net.layers.push_back(std::move(layer));
    }
    net.hook = HookSite::parse(arch.value("hook", std::string("penultimate")));
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, arch_path.string() + ": " + e.what());
  }
  try {
    net.validate();
  } catch (const Error& e) {
    throw e.with_context(dir.string());
  }
  return net;
}

}  // namespace ash
