#include <benchmark/benchmark.h>
#include <omp.h>

#include "eed2d/experiments.hpp"

using namespace eed2d;

namespace {

ExperimentConfig config(int trials) {
  ExperimentConfig c;
  c.values = {10.0, 20.0, 30.0};
  c.trials = trials;
  c.record_timing = false;
  return c;
}

void BM_SweepSerial(benchmark::State& state) {
  const ExperimentConfig c = config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(c));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}

void BM_SweepParallel(benchmark::State& state) {
  const ExperimentConfig c = config(static_cast<int>(state.range(0)));
  state.counters["threads"] = omp_get_max_threads();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 3);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
