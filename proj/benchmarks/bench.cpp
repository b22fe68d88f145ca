// Microbenchmarks for the hot paths: KS statistic, knockoff fit/sampling,
// forecaster training and prediction, and the synthetic generator.
#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "gcause/forecaster.hpp"
#include "gcause/invariance.hpp"
#include "gcause/knockoff.hpp"
#include "gcause/rng.hpp"
#include "gcause/standardize.hpp"
#include "gcause/stats.hpp"
#include "gcause/synth.hpp"

using namespace gcause;

namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

MultivariateSeries gaussian_series(Eigen::Index length, Eigen::Index n_vars,
                                   std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(length, n_vars);
  for (Eigen::Index t = 0; t < length; ++t)
    for (Eigen::Index j = 0; j < n_vars; ++j) m(t, j) = rng.normal();
  return MultivariateSeries::make(std::move(m), default_names(n_vars));
}

MultivariateSeries benchmark_series(std::uint64_t seed) {
  GroupPartition p{{{"G1", {0, 1}}, {"G2", {2, 3}}}};
  auto graph = sample_graph(p, 0.5, {0, 1}, 2, seed);
  SimConfig sim;
  sim.seed = seed;
  auto raw = simulate(graph, sim);
  return standardize(raw, IndexRange{0, raw.length()}).first;
}

void bm_ks_two_sample(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto a = normal_sample(n, 1);
  auto b = normal_sample(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ks_two_sample(a, b));
}
BENCHMARK(bm_ks_two_sample)->RangeMultiplier(4)->Range(64, 4096);

void bm_knockoff_fit(benchmark::State& state) {
  auto series = gaussian_series(1000, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(series));
}
BENCHMARK(bm_knockoff_fit)->Arg(4)->Arg(8)->Arg(16);

void bm_knockoff_sample(benchmark::State& state) {
  auto series = gaussian_series(1000, 4, 4);
  auto model = fit_gaussian(series);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_knockoffs(model, series, ++seed));
}
BENCHMARK(bm_knockoff_sample);

void bm_simulate(benchmark::State& state) {
  GroupPartition p{{{"G1", {0, 1}}, {"G2", {2, 3}}}};
  auto graph = sample_graph(p, 1.0, {0, 1}, 2, 5);
  SimConfig sim;
  sim.length = state.range(0);
  sim.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(graph, sim));
}
BENCHMARK(bm_simulate)->RangeMultiplier(4)->Range(250, 4000);

void bm_train_epoch(benchmark::State& state) {
  auto series = benchmark_series(6);
  ForecasterConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 6;
  auto windows = make_windows(series.length(), cfg.context, cfg.horizon, cfg.horizon);
  for (auto _ : state) benchmark::DoNotOptimize(train(series, windows, cfg));
}
BENCHMARK(bm_train_epoch)->Unit(benchmark::kMillisecond);

void bm_predict_window(benchmark::State& state) {
  auto series = benchmark_series(7);
  ForecasterConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 7;
  auto windows = make_windows(series.length(), cfg.context, cfg.horizon, cfg.horizon);
  auto model = train(series, windows, cfg);
  for (auto _ : state)
    benchmark::DoNotOptimize(predict(model, series.values.topRows(cfg.context),
                                     cfg.horizon));
}
BENCHMARK(bm_predict_window);

void bm_test_group_edge(benchmark::State& state) {
  auto series = benchmark_series(8);
  GroupPartition p{{{"G1", {0, 1}}, {"G2", {2, 3}}}};
  ForecasterConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 8;
  auto windows = make_windows(series.length(), cfg.context, cfg.horizon, cfg.horizon);
  auto model = train(series, windows, cfg);
  auto knockoff = fit_gaussian(series);
  InferenceConfig ic;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        test_group_edge(model, series, windows, p, 0, 1, knockoff, ic));
  state.SetLabel(std::to_string(windows.count()) + " windows");
}
BENCHMARK(bm_test_group_edge)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
