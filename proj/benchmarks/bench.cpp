#include <benchmark/benchmark.h>

#include <random>

#include "sigmove/features.hpp"
#include "sigmove/forest.hpp"
#include "sigmove/harness/synthetic.hpp"
#include "sigmove/indicators.hpp"
#include "sigmove/metrics.hpp"
#include "sigmove/nn/network.hpp"

using namespace sigmove;

namespace {

const PriceSeries& prices() {
  static const auto s = harness::generate_synthetic(harness::SyntheticKind::gaussian, 2500, 1);
  return s;
}

LabeledDataset dataset(std::size_t window) {
  return build_dataset(compute_log_returns(prices()), {.window = window, .standardize = true});
}

void BM_TrainStep(benchmark::State& state, nn::ModelKind kind) {
  const std::size_t window = static_cast<std::size_t>(state.range(0));
  const auto spec = nn::NetworkSpec::make(kind, window);
  const auto params = nn::init_network(spec, 1);
  const auto ds = dataset(window);
  const auto x = nn::make_input(spec, std::span(ds.features.values).first(32 * window), 32);
  const std::span<const std::uint8_t> y(ds.labels.data(), 32);
  nn::Workspace ws;
  nn::LossAndGradient out;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    nn::backward(spec, params, x, y, ++seed, ws, out);
    benchmark::DoNotOptimize(out.loss);
  }
}
BENCHMARK_CAPTURE(BM_TrainStep, mlp, nn::ModelKind::mlp)->Arg(7)->Arg(60);
BENCHMARK_CAPTURE(BM_TrainStep, cnn, nn::ModelKind::cnn)->Arg(7)->Arg(60);
BENCHMARK_CAPTURE(BM_TrainStep, lstm, nn::ModelKind::lstm)->Arg(7)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  const auto ds = dataset(static_cast<std::size_t>(state.range(0)));
  ForestConfig cfg;
  cfg.n_trees = 100;
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(ds, cfg));
}
BENCHMARK(BM_ForestFit)->Arg(7)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_RocCurve(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  std::vector<std::uint8_t> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = static_cast<double>(rng() % 1000);
    labels[i] = rng() % 2;
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_curve(scores, labels).auc);
}
BENCHMARK(BM_RocCurve)->Arg(600)->Arg(100000);

void BM_WilderRsi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(wilder_rsi(prices(), 14));
}
BENCHMARK(BM_WilderRsi);

}  // namespace
