#include <doctest.h>

#include <algorithm>
#include <set>

#include "bolimes/dataset.hpp"
#include "bolimes/errors.hpp"
#include "bolimes/pipeline.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

namespace {

PipelineConfig fast_config() {
    PipelineConfig config;
    config.boruta.n_estimators = 80;
    config.boruta.max_iter = 40;
    config.lime.n_perturbations = 300;
    config.classifier.forest.n_estimators = 50;
    config.seed = 42;
    config.n_threads = 2;
    return config;
}

}  // namespace

TEST_CASE("sweep_k_values clamps, strides and always ends at the limit") {
    CHECK(sweep_k_values(10, 1, 12) == std::vector<int>{10, 11, 12});
    CHECK(sweep_k_values(10, 1, 7) == std::vector<int>{7});
    CHECK(sweep_k_values(10, 5, 22) == std::vector<int>{10, 15, 20, 22});
    CHECK(sweep_k_values(1, 1, 1) == std::vector<int>{1});
}

TEST_CASE("pick_best takes the first maximum, i.e. the smallest k among ties") {
    std::vector<KPoint> curve(4);
    curve[0].k = 10;
    curve[0].metrics.accuracy = 0.80;
    curve[1].k = 11;
    curve[1].metrics.accuracy = 0.95;
    curve[2].k = 12;
    curve[2].metrics.accuracy = 0.95;
    curve[3].k = 13;
    curve[3].metrics.accuracy = 0.90;
    CHECK(pick_best(curve) == 1);
    CHECK(curve[pick_best(curve)].k == 11);
}

TEST_CASE("run_bolimes on planted data: containment, consistency, determinism") {
    SyntheticSpec spec;
    spec.n_samples = 150;
    spec.n_informative = 8;
    spec.n_noise = 112;
    spec.n_classes = 3;
    spec.class_separation = 2.5;
    spec.seed = 7;
    auto [ds, informative] = synthesize(spec);

    const PipelineConfig config = fast_config();
    const SelectionResult result = run_bolimes(ds, config);

    const auto confirmed = result.boruta.confirmed_indices();
    REQUIRE_FALSE(confirmed.empty());

    SUBCASE("containment: X_opt inside X* inside original features") {
        const std::set<std::size_t> confirmed_set(confirmed.begin(), confirmed.end());
        CHECK(result.selected_indices.size() == static_cast<std::size_t>(result.k_star));
        for (std::size_t j : result.selected_indices) {
            CHECK(confirmed_set.count(j) == 1);
            CHECK(j < ds.n_features());
        }
    }
    SUBCASE("k_star lies in the clamped range and best accuracy tops the curve") {
        const int limit = static_cast<int>(confirmed.size());
        CHECK(result.k_star >= std::min(config.k_min, limit));
        CHECK(result.k_star <= limit);
        for (const auto& point : result.curve)
            CHECK(point.metrics.accuracy <= result.best_accuracy);
        CHECK(result.best_accuracy ==
              result.curve[pick_best(result.curve)].metrics.accuracy);
    }
    SUBCASE("X_opt equals the first k_star ranking entries") {
        for (std::size_t i = 0; i < result.selected_indices.size(); ++i)
            CHECK(result.selected_indices[i] == confirmed[result.ranking.order[i]]);
    }
    SUBCASE("consistency: retraining on X_opt with the stored seed reproduces best accuracy") {
        const SplitPair split = stratified_split(ds, config.protocol.holdout_fraction,
                                                 derive_seed(config.seed, "split"));
        ForestParams params = config.classifier.forest;
        params.seed = derive_seed(config.seed, "sweep/k=" + std::to_string(result.k_star));
        const Matrix x_train = split.train.x.select_columns(result.selected_indices);
        TrainedModel model(RandomForest::train(x_train, split.train.labels,
                                               split.train.n_classes(), params, 2));
        const Dataset test_k = split.test.select_columns(result.selected_indices);
        CHECK(evaluate(model, test_k).accuracy == result.best_accuracy);
        // and the stored model agrees
        CHECK(evaluate(result.best_model, test_k).accuracy == result.best_accuracy);
    }
    SUBCASE("thread count does not change the result") {
        PipelineConfig serial = config;
        serial.n_threads = 1;
        const SelectionResult again = run_bolimes(ds, serial);
        CHECK(again.k_star == result.k_star);
        CHECK(again.best_accuracy == result.best_accuracy);
        CHECK(again.selected_indices == result.selected_indices);
        CHECK(again.ranking.order == result.ranking.order);
        CHECK(again.ranking.scores == result.ranking.scores);
        REQUIRE(again.curve.size() == result.curve.size());
        for (std::size_t i = 0; i < result.curve.size(); ++i) {
            CHECK(again.curve[i].k == result.curve[i].k);
            CHECK(again.curve[i].metrics.accuracy == result.curve[i].metrics.accuracy);
        }
    }
}

TEST_CASE("small confirmed sets clamp the sweep to a single k") {
    SyntheticSpec spec;
    spec.n_samples = 120;
    spec.n_informative = 4;
    spec.n_noise = 26;
    spec.n_classes = 2;
    spec.class_separation = 3.5;
    spec.seed = 3;
    auto [ds, informative] = synthesize(spec);
    PipelineConfig config = fast_config();
    const SelectionResult result = run_bolimes(ds, config);
    const auto confirmed = result.boruta.confirmed_indices();
    if (confirmed.size() < static_cast<std::size_t>(config.k_min)) {
        CHECK(result.curve.size() == 1);
        CHECK(result.k_star == static_cast<int>(confirmed.size()));
    } else {
        CHECK(result.k_star >= config.k_min);
    }
}

TEST_CASE("all-noise data raises NoRelevantFeatures carrying the boruta result") {
    SyntheticSpec spec;
    spec.n_samples = 60;
    spec.n_informative = 1;
    spec.n_noise = 39;
    spec.n_classes = 2;
    spec.class_separation = 0.0;
    spec.seed = 2;
    auto [ds, informative] = synthesize(spec);
    PipelineConfig config = fast_config();
    config.boruta.max_iter = 25;
    try {
        run_bolimes(ds, config);
        FAIL("expected NoRelevantFeatures");
    } catch (const NoRelevantFeatures& e) {
        CHECK(e.boruta.status.size() == 40);
        CHECK(e.boruta.count(FeatureStatus::Confirmed) == 0);
    }
}

TEST_CASE("sweep_curve evaluates identical test rows for every k") {
    SyntheticSpec spec;
    spec.n_samples = 90;
    spec.n_informative = 6;
    spec.n_noise = 14;
    spec.n_classes = 2;
    spec.class_separation = 2.0;
    spec.seed = 11;
    auto [ds, informative] = synthesize(spec);
    const SplitPair split = stratified_split(ds, 0.2, 17);
    std::vector<std::size_t> ranked(ds.n_features());
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i] = i;
    ClassifierSpec classifier;
    classifier.forest.n_estimators = 30;
    const std::vector<int> ks{1, 5, 10, 20};
    const auto curve = sweep_curve(split, ranked, classifier, ks, 42, 2);
    REQUIRE(curve.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(curve[i].k == ks[i]);
        CHECK(curve[i].metrics.n_test == static_cast<std::int64_t>(split.test.n_samples()));
    }
    const std::vector<int> too_big{25};
    CHECK_THROWS_AS(sweep_curve(split, ranked, classifier, too_big, 42, 2), InvalidArgument);
}

TEST_CASE("on planted data more ranked features beat a single one") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        SyntheticSpec spec;
        spec.n_samples = 100;
        spec.n_informative = 6;
        spec.n_noise = 14;
        spec.n_classes = 3;
        spec.class_separation = 1.5;
        spec.seed = seed;
        auto [ds, informative] = synthesize(spec);
        const SplitPair split = stratified_split(ds, 0.25, seed);
        // rank the planted features first, everything else after
        std::vector<std::size_t> ranked(informative);
        for (std::size_t j = 0; j < ds.n_features(); ++j)
            if (std::find(informative.begin(), informative.end(), j) == informative.end())
                ranked.push_back(j);
        ClassifierSpec classifier;
        classifier.forest.n_estimators = 60;
        const std::vector<int> ks{1, static_cast<int>(spec.n_informative)};
        const auto curve = sweep_curve(split, ranked, classifier, ks, seed, 2);
        CHECK(curve[1].metrics.accuracy >= curve[0].metrics.accuracy);
    }
}

TEST_CASE("gradient boosting as the evaluation classifier") {
    SyntheticSpec spec;
    spec.n_samples = 80;
    spec.n_informative = 5;
    spec.n_noise = 15;
    spec.n_classes = 2;
    spec.class_separation = 3.0;
    spec.seed = 23;
    auto [ds, informative] = synthesize(spec);
    PipelineConfig config = fast_config();
    config.classifier.kind = ClassifierKind::Gbt;
    config.classifier.gbt = GbtParams{15, 3, 0.1};
    const SelectionResult result = run_bolimes(ds, config);
    CHECK(result.best_model.kind() == ModelKind::Gbt);
    CHECK(result.best_accuracy >= 0.75);
    CHECK(result.selected_indices.size() == static_cast<std::size_t>(result.k_star));
}

TEST_CASE("cross-validation protocol produces a pooled-confusion curve") {
    SyntheticSpec spec;
    spec.n_samples = 80;
    spec.n_informative = 5;
    spec.n_noise = 15;
    spec.n_classes = 2;
    spec.class_separation = 2.5;
    spec.seed = 19;
    auto [ds, informative] = synthesize(spec);
    PipelineConfig config = fast_config();
    config.protocol.cv_folds = 4;
    const SelectionResult result = run_bolimes(ds, config);
    for (const auto& point : result.curve)
        CHECK(point.metrics.n_test == static_cast<std::int64_t>(ds.n_samples()));
    CHECK(result.best_model.n_features() == result.selected_indices.size());
}
