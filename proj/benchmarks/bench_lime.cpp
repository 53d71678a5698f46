#include <benchmark/benchmark.h>

#include "bolimes/dataset.hpp"
#include "bolimes/forest.hpp"
#include "bolimes/lime.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

static void BM_FitSurrogate(benchmark::State& state) {
    const std::size_t m = 1000;
    const auto p = static_cast<std::size_t>(state.range(0));
    Rng rng(33);
    Matrix z(m, p);
    std::vector<double> f(m), w(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) z(i, j) = rng.next_gaussian();
        f[i] = rng.next_gaussian();
        w[i] = 0.1 + 0.9 * rng.next_double();
    }
    for (auto _ : state) {
        auto exp = fit_surrogate(z, f, w, 1.0);
        benchmark::DoNotOptimize(exp);
    }
}
BENCHMARK(BM_FitSurrogate)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ExplainInstance(benchmark::State& state) {
    SyntheticSpec spec;
    spec.n_samples = 150;
    spec.n_informative = 8;
    spec.n_noise = 12;
    spec.n_classes = 3;
    spec.class_separation = 2.0;
    spec.seed = 3;
    const auto ds = synthesize(spec).first;
    ForestParams fp;
    fp.n_estimators = 300;
    fp.seed = 11;
    const TrainedModel model(
        RandomForest::train(ds.x, ds.labels, ds.n_classes(), fp, 0));
    LimeParams params;
    params.n_perturbations = static_cast<int>(state.range(0));
    const Standardizer standardizer = Standardizer::fit(ds.x);
    std::vector<double> proba(3);
    const ScalarFn fn = [&](std::span<const double> row) {
        model.predict_proba_row(row, proba);
        return proba[0];
    };
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto exp = explain_instance(fn, standardizer, ds.x.row(0), 0, params, ++seed);
        benchmark::DoNotOptimize(exp);
    }
}
BENCHMARK(BM_ExplainInstance)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
