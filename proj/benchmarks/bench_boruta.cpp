#include <benchmark/benchmark.h>

#include "bolimes/boruta.hpp"
#include "bolimes/dataset.hpp"

using namespace bolimes;

static void BM_MakeShadow(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_samples = 200;
    spec.n_informative = 10;
    spec.n_noise = static_cast<std::size_t>(state.range(0)) - 10;
    spec.seed = 5;
    const auto ds = synthesize(spec).first;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto aug = make_shadow(ds.x, ++seed);
        benchmark::DoNotOptimize(aug);
    }
}
BENCHMARK(BM_MakeShadow)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_BorutaIterations(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_samples = 200;
    spec.n_informative = 10;
    spec.n_noise = 490;
    spec.n_classes = 3;
    spec.class_separation = 2.0;
    spec.seed = 7;
    const auto ds = synthesize(spec).first;
    BorutaParams params;
    params.max_iter = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto result = boruta_run(ds, params, 0);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_BorutaIterations)->Arg(5)->Arg(15)->Unit(benchmark::kMillisecond)
    ->Iterations(1);

BENCHMARK_MAIN();
