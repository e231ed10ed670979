// Microbenchmarks for the hot paths: Gaussian generation, the per-sample
// weight kernel at low and high dimension, a full point estimate, and the
// finite-difference reference solver.

#include "zakai/estimator.hpp"
#include "zakai/model.hpp"
#include "zakai/random_pde.hpp"
#include "zakai/rng.hpp"
#include "zakai/simulate.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace zakai;

SignalObservationPath make_observation(int d, int steps, std::uint64_t seed) {
  ExampleModelParams params;
  params.d = d;
  const FilteringModel model = build_example_model(params);
  return simulate_signal_observation(model, TimeGrid{0.5, steps}, params.alpha,
                                     philox_stream_factory(seed));
}

void BM_GaussianFill(benchmark::State& state) {
  PhiloxGaussianStream stream(1, kFirstSampleStream);
  std::vector<double> buffer(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    stream.fill(buffer);
    benchmark::DoNotOptimize(buffer.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GaussianFill)->Arg(1024)->Arg(65536);

void BM_SampleLogWeight(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  ExampleModelParams params;
  params.d = d;
  const FilteringModel model = build_example_model(params);
  const SignalObservationPath obs = make_observation(d, 100, 3);
  const Vector x = Vector::Zero(d);

  std::uint64_t sample = 0;
  for (auto _ : state) {
    PhiloxGaussianStream stream(7, kFirstSampleStream + sample++);
    benchmark::DoNotOptimize(sample_log_weight(model, obs, x, stream));
  }
  // One item = one Euler step of the weight kernel.
  state.SetItemsProcessed(state.iterations() * obs.grid.steps);
}
BENCHMARK(BM_SampleLogWeight)->Arg(1)->Arg(25);

void BM_EstimatePoint(benchmark::State& state) {
  const ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const SignalObservationPath obs = make_observation(params.d, 100, 3);

  EstimatorConfig config;
  config.samples = state.range(0);
  config.seed = 5;
  config.chunk_size = 1024;  // enough chunks for the worker counts below
  config.workers = static_cast<int>(state.range(1));

  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_point(model, obs, Vector::Zero(1), config));
  }
  state.SetItemsProcessed(state.iterations() * config.samples * obs.grid.steps);
}
BENCHMARK(BM_EstimatePoint)->Args({10000, 1})->Args({10000, 4})->UseRealTime();

void BM_RandomPde(benchmark::State& state) {
  const ExampleModelParams params;
  const FilteringModel model = build_example_model(params);
  const SignalObservationPath obs = make_observation(params.d, 100, 3);
  const PdeGrid1d grid{-6.0, 6.0, static_cast<int>(state.range(0)),
                       static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_random_pde(model, obs, grid));
  }
}
BENCHMARK(BM_RandomPde)->Arg(200)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
