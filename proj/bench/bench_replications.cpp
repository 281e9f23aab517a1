// Serial reference runner against the OpenMP fan-out on the same scenario.
// Output is identical between the two; only wall time differs.

#include "kbh/simulation.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

kbh::ScenarioConfig scenario(kbh::Index d) {
    kbh::ScenarioConfig c;
    c.n = 5 * d;
    c.d = d;
    c.k = d / 5;
    c.reps = 64;
    c.seed = 1;
    return c;
}

void BM_Serial(benchmark::State& state) {
    const auto c = scenario(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kbh::run_replications_serial(c));
    state.SetItemsProcessed(state.iterations() * c.reps);
}

void BM_OpenMP(benchmark::State& state) {
    const auto c = scenario(state.range(0));
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(kbh::run_replications(c, threads));
    state.SetItemsProcessed(state.iterations() * c.reps);
}

void thread_args(benchmark::internal::Benchmark* b) {
    for (int d : {20, 50})
        for (int t = 1; t <= omp_get_num_procs(); t *= 2) b->Args({d, t});
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)->Apply(thread_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
