#include <benchmark/benchmark.h>

#include "bolimes/dataset.hpp"
#include "bolimes/forest.hpp"
#include "bolimes/gbt.hpp"

using namespace bolimes;

namespace {

Dataset planted(std::size_t n, std::size_t p, int k) {
    SyntheticSpec spec;
    spec.n_samples = n;
    spec.n_informative = std::max<std::size_t>(4, p / 20);
    spec.n_noise = p - spec.n_informative;
    spec.n_classes = k;
    spec.class_separation = 2.0;
    spec.seed = 91;
    return synthesize(spec).first;
}

}  // namespace

static void BM_TrainForest(benchmark::State& state) {
    const auto ds = planted(200, static_cast<std::size_t>(state.range(0)), 3);
    ForestParams params;
    params.n_estimators = static_cast<int>(state.range(1));
    params.seed = 17;
    for (auto _ : state) {
        auto forest = RandomForest::train(ds.x, ds.labels, ds.n_classes(), params, 0);
        benchmark::DoNotOptimize(forest);
    }
}
BENCHMARK(BM_TrainForest)->Args({100, 100})->Args({500, 100})->Args({500, 300})
    ->Unit(benchmark::kMillisecond);

static void BM_ForestPredict(benchmark::State& state) {
    const auto ds = planted(200, 100, 3);
    ForestParams params;
    params.n_estimators = 300;
    params.seed = 3;
    const auto forest = RandomForest::train(ds.x, ds.labels, ds.n_classes(), params, 0);
    std::vector<double> proba(3);
    std::size_t row = 0;
    for (auto _ : state) {
        forest.predict_proba_row(ds.x.row(row), proba);
        benchmark::DoNotOptimize(proba);
        row = (row + 1) % ds.n_samples();
    }
}
BENCHMARK(BM_ForestPredict);

static void BM_TrainGbt(benchmark::State& state) {
    const auto ds = planted(150, 50, 3);
    GbtParams params;
    params.n_estimators = static_cast<int>(state.range(0));
    params.max_depth = 5;
    params.learning_rate = 0.05;
    for (auto _ : state) {
        auto model = GradientBoosted::train(ds.x, ds.labels, ds.n_classes(), params, 0);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_TrainGbt)->Arg(25)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
