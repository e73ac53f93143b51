// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ash/benchmark.hpp"
#include "ash/experiment.hpp"
#include "ash/metrics.hpp"
#include "ash/shaping.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using ash::FeatureTensor;
using ash::ShapingConfig;
using ash::ShapingMethod;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

ShapingConfig step(ShapingMethod m, double p) {
  ShapingConfig c;
  c.method = m;
  c.p = p;
  return c;
}

Outcome algorithm_exactness() {
  const FeatureTensor x({1, 2, 3, 4});
  const double e109 = 3.0377325069680314;  // exp(10/9)
  const double e1 = 2.718281828459045;
  struct Case {
    ShapingConfig cfg;
    std::vector<double> want;
  };
  auto linear = step(ShapingMethod::ash_s, 50);
  linear.scaling = ash::Scaling::linear;
  const std::vector<Case> cases = {
      {step(ShapingMethod::ash_p, 75), {0, 0, 3, 4}},
      {step(ShapingMethod::ash_p, 0), {1, 2, 3, 4}},
      {step(ShapingMethod::ash_b, 50), {0, 10.0 / 3, 10.0 / 3, 10.0 / 3}},
      {step(ShapingMethod::ash_b, 0), {2.5, 2.5, 2.5, 2.5}},
      {step(ShapingMethod::ash_s, 50), {0, 2 * e109, 3 * e109, 4 * e109}},
      {step(ShapingMethod::ash_s, 0), {e1, 2 * e1, 3 * e1, 4 * e1}},
      {linear, {0, 20.0 / 9, 30.0 / 9, 40.0 / 9}},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto out = ash::apply_shaping(x, c.cfg).tensor;
    for (std::size_t i = 0; i < 4; ++i) {
      // relative for the scaled entries, which float32 stores to ~1e-7 relative
      worst = std::max(worst, std::abs(out[i] - c.want[i]) / std::max(1.0, std::abs(c.want[i])));
    }
  }
  const auto p5 = ash::ash_p(FeatureTensor({5, 5, 5, 5}), step(ShapingMethod::ash_p, 90)).tensor;
  const auto zero = ash::ash_b(FeatureTensor({0, 0, 0, 0}), step(ShapingMethod::ash_b, 50));
  const bool edge_ok = p5 == FeatureTensor({5, 5, 5, 5}) && zero.report.degenerate &&
                       zero.tensor == FeatureTensor({0, 0, 0, 0});
  return {worst <= 1e-6 && edge_ok, fmt("max deviation %.2e over %g worked cases", worst, cases.size() + 2.0)};
}

Outcome sum_laws() {
  std::mt19937_64 rng(4096);
  std::uniform_int_distribution<int> size(1, 4096);
  std::uniform_int_distribution<int> pct(0, 99);
  double worst_b = 0.0, worst_s = 0.0;
  int checked_b = 0, checked_s = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto values = fixture::normal_values(rng, size(rng), 1.0, 1.0);
    const int p = pct(rng);
    const FeatureTensor x(values);
    const double t = oracle::percentile(values, p);
    double s1 = 0.0, s2 = 0.0;
    for (float v : values) {
      s1 += v;
      if (v >= t) s2 += v;
    }

    const auto b = ash::ash_b(x, step(ShapingMethod::ash_b, p));
    if (!b.report.degenerate && s1 != 0.0) {
      double sum = 0.0;
      for (float v : b.tensor.values()) sum += v;
      worst_b = std::max(worst_b, std::abs(sum - s1) / std::abs(s1));
      ++checked_b;
    }
    const auto s = ash::ash_s(x, step(ShapingMethod::ash_s, p));
    if (!s.report.degenerate && s2 != 0.0) {
      double sum = 0.0;
      for (float v : s.tensor.values()) sum += v;
      const double want = s2 * std::exp(s1 / s2);
      worst_s = std::max(worst_s, std::abs(sum - want) / std::abs(want));
      ++checked_s;
    }
  }
  return {worst_b <= 1e-5 && worst_s <= 1e-5 && checked_b > 9000 && checked_s > 9000,
          fmt("ASH-B max rel err %.2e (%g tensors), ASH-S max rel err %.2e (%g tensors)", worst_b, checked_b,
              worst_s, checked_s)};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> size(1, 50);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<int> level(0, 1 + trial % 12);
    ash::ScoreSet s{std::vector<double>(size(rng)), std::vector<double>(size(rng))};
    for (auto& v : s.id) v = level(rng) * 0.25;
    for (auto& v : s.ood) v = level(rng) * 0.25;
    worst = std::max({worst, std::abs(ash::auroc(s) - oracle::auroc(s.id, s.ood)),
                      std::abs(ash::aupr(s) - oracle::average_precision(s.id, s.ood)),
                      std::abs(ash::fpr_at_tpr(s) - oracle::fpr_at_tpr(s.id, s.ood, 0.95))});
  }
  return {worst <= 1e-9, fmt("max |fast - oracle| = %.2e over 1000 tied score sets", worst)};
}

ash::ExperimentConfig bench_config(nlohmann::json methods, nlohmann::json sweep, const char* mode = "local") {
  return ash::parse_config({{"id_train", "bench"},
                            {"id_eval", "bench"},
                            {"ood_eval", "bench"},
                            {"network", "bench"},
                            {"methods", std::move(methods)},
                            {"sweep", std::move(sweep)},
                            {"threshold_mode", mode},
                            {"seed", 0}});
}

struct Bench {
  ash::Benchmark b;
  ash::EvalData data;
  double build_seconds = 0.0;
};

const Bench& bench() {
  static const Bench instance = [] {
    const auto start = std::chrono::steady_clock::now();
    Bench out{ash::build_benchmark(ash::standard_benchmark_spec()), {}, 0.0};
    out.data = {out.b.train, out.b.id_eval, out.b.ood_eval};
    out.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }();
  return instance;
}

double row_value(const ash::ExperimentReport& r, const std::string& method, double p,
                 const std::function<double(const ash::MetricReport&)>& get) {
  for (const auto& row : r.rows) {
    if (row.method == method && row.p == p) return get(row.metrics);
  }
  throw std::runtime_error("row " + method + " missing");
}

double auroc_of(const ash::MetricReport& m) { return m.auroc; }
double acc_of(const ash::MetricReport& m) { return *m.id_accuracy; }

Outcome argmax_invariance() {
  std::vector<double> ps;
  for (int p = 0; p < 100; ++p) ps.push_back(p);
  ps.push_back(99.9);
  const auto& b = bench();
  const auto r = ash::run_experiment(bench_config({"ash-p", "ash-s"}, ps), b.b.net, b.data);
  bool bias_zero = true;
  for (float v : b.b.net.layers.back().bias) bias_zero = bias_zero && v == 0.0f;
  int equal = 0;
  for (double p : ps) equal += row_value(r, "ash-p", p, acc_of) == row_value(r, "ash-s", p, acc_of);
  return {bias_zero && equal == static_cast<int>(ps.size()),
          fmt("accuracy identical at %g of %g p values (final bias zero: %g)", equal, ps.size(), bias_zero)};
}

Outcome desk_scale_trend() {
  const auto start = std::chrono::steady_clock::now();
  const auto& b = bench();
  const auto r = ash::run_experiment(
      bench_config({"none", {{"method", "ash-s"}, {"p", 90}}, {{"method", "ash-rand"}, {"p", 65}}}, nlohmann::json::array()),
      b.b.net, b.data);
  const double energy = row_value(r, "none", ash::kNoPercentile, auroc_of);
  const double s90 = row_value(r, "ash-s", 90, auroc_of);
  const double r65 = row_value(r, "ash-rand", 65, auroc_of);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() + b.build_seconds;
  return {s90 > energy && energy < r65 && r65 < s90 && secs < 60.0,
          fmt("AUROC energy %.4f, ASH-RAND@65 %.4f, ASH-S@90 %.4f; %.1f s including training", energy, r65, s90,
              secs)};
}

Outcome global_vs_local() {
  std::mt19937_64 rng(5);
  int identical = 0, total = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const FeatureTensor x(fixture::normal_values(rng, 1 + trial * 7 % 1000));
    const double p = trial % 100;
    for (auto m : {ShapingMethod::ash_p, ShapingMethod::ash_b, ShapingMethod::ash_s, ShapingMethod::ash_rand}) {
      auto local = step(m, p);
      auto global = local;
      global.threshold_mode = ash::ThresholdMode::global;
      global.global_threshold = ash::calibrate_global_threshold(std::vector{x}, p);
      identical += ash::apply_shaping(x, local, trial).tensor.bit_equal(ash::apply_shaping(x, global, trial).tensor);
      ++total;
    }
  }
  const auto& b = bench();
  const auto local = ash::run_experiment(bench_config({{{"method", "ash-s"}, {"p", 90}}}, nlohmann::json::array()),
                                         b.b.net, b.data);
  const auto gcfg = bench_config({{{"method", "ash-s"}, {"p", 90}}}, nlohmann::json::array(), "global");
  const auto thresholds = ash::calibrate_thresholds(b.b.net, b.b.train, {90});
  const auto global = ash::run_experiment(gcfg, b.b.net, b.data, thresholds);
  const double l = local.rows[0].metrics.auroc;
  const double g = global.rows[0].metrics.auroc;
  return {identical == total && l >= g,
          fmt("self-calibrated global == local in %g of %g cases; ASH-S@90 AUROC local %.4f vs global %.4f",
              identical, total, l, g)};
}

Outcome accuracy_degradation() {
  const auto& b = bench();
  const auto r = ash::run_experiment(bench_config({"none", "ash-p", "ash-s"}, {0, 99.9}), b.b.net, b.data);
  const double base = row_value(r, "none", ash::kNoPercentile, acc_of);
  bool ok = true;
  std::string detail = fmt("unshaped %.4f", base);
  for (const char* m : {"ash-p", "ash-s"}) {
    const double a0 = row_value(r, m, 0, acc_of);
    const double a999 = row_value(r, m, 99.9, acc_of);
    ok = ok && a0 == base && a999 < base;
    detail += std::string("; ") + m + fmt(" p=0 %.4f, p=99.9 %.4f", a0, a999);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"algorithm exactness", algorithm_exactness},
      {"sum laws", sum_laws},
      {"metric oracle equivalence", metric_oracles},
      {"argmax invariance (zero-bias head)", argmax_invariance},
      {"desk-scale trend", desk_scale_trend},
      {"global vs local thresholds", global_vs_local},
      {"accuracy degradation", accuracy_degradation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
