#include "bolimes/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "bolimes/rng.hpp"

namespace bolimes {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

TrainedModel train_classifier(const ClassifierSpec& spec, const Matrix& x, std::span<const int> y,
                              int n_classes, std::uint64_t seed, int n_threads) {
    if (spec.kind == ClassifierKind::Forest) {
        ForestParams params = spec.forest;
        params.seed = seed;
        return TrainedModel(RandomForest::train(x, y, n_classes, params, n_threads));
    }
    return TrainedModel(GradientBoosted::train(x, y, n_classes, spec.gbt, seed));
}

}  // namespace

std::string to_string(ClassifierKind k) {
    return k == ClassifierKind::Forest ? "forest" : "gbt";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
    if (s == "forest") return ClassifierKind::Forest;
    if (s == "gbt") return ClassifierKind::Gbt;
    throw InvalidArgument("unknown classifier kind: " + s);
}

void PipelineConfig::validate() const {
    boruta.validate();
    lime.validate();
    if (k_min < 1) throw InvalidArgument("pipeline: k_min must be >= 1");
    if (k_step < 1) throw InvalidArgument("pipeline: k_step must be >= 1");
    if (protocol.cv_folds == 0 &&
        !(protocol.holdout_fraction > 0.0 && protocol.holdout_fraction < 0.5))
        throw InvalidArgument("pipeline: holdout fraction must be in (0, 0.5)");
    if (protocol.cv_folds != 0 && protocol.cv_folds < 2)
        throw InvalidArgument("pipeline: cv_folds must be 0 (holdout) or >= 2");
}

GlobalRanking rank_features(const Dataset& ds, std::span<const std::size_t> confirmed,
                            const PipelineConfig& config) {
    if (confirmed.empty()) throw InvalidArgument("rank_features: empty confirmed set");

    // The LIME black box sees only training rows so the held-out split stays
    // untouched by the explanation stage.
    Dataset train_on_confirmed;
    if (config.protocol.cv_folds >= 2) {
        train_on_confirmed = ds.select_columns(confirmed);
    } else {
        const SplitPair split = stratified_split(ds, config.protocol.holdout_fraction,
                                                 derive_seed(config.seed, "split"));
        train_on_confirmed = split.train.select_columns(confirmed);
    }

    ForestParams bb_params;
    bb_params.n_estimators = config.boruta.n_estimators;
    bb_params.tree = config.boruta.tree;
    bb_params.seed = derive_seed(config.seed, "lime/blackbox");
    const TrainedModel black_box(RandomForest::train(train_on_confirmed.x,
                                                     train_on_confirmed.labels, ds.n_classes(),
                                                     bb_params, config.n_threads));

    LimeParams lime_params = config.lime;
    lime_params.seed = derive_seed(config.seed, "lime");
    const auto explanations =
        explain_all(black_box, train_on_confirmed, lime_params, config.n_threads);
    return global_ranking(explanations, lime_params.aggregation);
}

std::vector<int> sweep_k_values(int k_min, int k_step, int limit) {
    std::vector<int> out;
    for (int k = std::min(k_min, limit); k <= limit; k += k_step) out.push_back(k);
    if (out.empty() || out.back() != limit) out.push_back(limit);
    return out;
}

std::vector<KPoint> sweep_curve(const SplitPair& split,
                                std::span<const std::size_t> ranked_features,
                                const ClassifierSpec& spec, std::span<const int> k_values,
                                std::uint64_t master_seed, int n_threads) {
    if (k_values.empty()) throw InvalidArgument("sweep_curve: empty k range");
    std::vector<KPoint> curve;
    curve.reserve(k_values.size());
    for (int k : k_values) {
        if (k < 1 || static_cast<std::size_t>(k) > ranked_features.size())
            throw InvalidArgument("sweep_curve: k=" + std::to_string(k) +
                                  " exceeds ranking length");
        const std::span<const std::size_t> top_k(ranked_features.data(),
                                                 static_cast<std::size_t>(k));
        const auto start = Clock::now();
        const Matrix x_train = split.train.x.select_columns(top_k);
        const TrainedModel model =
            train_classifier(spec, x_train, split.train.labels, split.train.n_classes(),
                             derive_seed(master_seed, "sweep/k=" + std::to_string(k)), n_threads);
        const Dataset test_k = split.test.select_columns(top_k);
        KPoint point;
        point.k = k;
        point.metrics = evaluate(model, test_k);
        point.train_s = seconds_since(start);
        curve.push_back(std::move(point));
    }
    return curve;
}

std::size_t pick_best(std::span<const KPoint> curve) {
    if (curve.empty()) throw InvalidArgument("pick_best: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].metrics.accuracy > curve[best].metrics.accuracy) best = i;
    return best;
}

namespace {

// Cross-validation sweep: per k, pooled confusion over stratified folds.
std::vector<KPoint> sweep_curve_cv(const Dataset& ds,
                                   std::span<const std::size_t> ranked_features,
                                   const ClassifierSpec& spec, std::span<const int> k_values,
                                   const PipelineConfig& config) {
    const auto folds = stratified_folds(ds, config.protocol.cv_folds,
                                        derive_seed(config.seed, "cv"));
    std::vector<KPoint> curve;
    for (int k : k_values) {
        if (k < 1 || static_cast<std::size_t>(k) > ranked_features.size())
            throw InvalidArgument("sweep_curve: k=" + std::to_string(k) +
                                  " exceeds ranking length");
        const std::span<const std::size_t> top_k(ranked_features.data(),
                                                 static_cast<std::size_t>(k));
        const auto start = Clock::now();
        const Dataset ds_k = ds.select_columns(top_k);
        ConfusionMatrix pooled{ds.n_classes(),
                               std::vector<std::int64_t>(
                                   static_cast<std::size_t>(ds.n_classes()) *
                                   static_cast<std::size_t>(ds.n_classes()))};
        for (int fold = 0; fold < config.protocol.cv_folds; ++fold) {
            std::vector<std::size_t> train_rows;
            std::vector<std::size_t> test_rows;
            for (std::size_t i = 0; i < folds.size(); ++i)
                (folds[i] == fold ? test_rows : train_rows).push_back(i);
            if (test_rows.empty()) continue;
            const Dataset train = ds_k.select_rows(train_rows);
            const Dataset test = ds_k.select_rows(test_rows);
            const TrainedModel model = train_classifier(
                spec, train.x, train.labels, ds.n_classes(),
                derive_seed(config.seed,
                            "sweep/k=" + std::to_string(k) + "/fold=" + std::to_string(fold)),
                config.n_threads);
            const auto predictions = predict(model, test.x);
            for (std::size_t i = 0; i < predictions.size(); ++i)
                ++pooled.at(test.labels[i], predictions[i]);
        }
        KPoint point;
        point.k = k;
        point.metrics = weighted_metrics(pooled);
        point.train_s = seconds_since(start);
        curve.push_back(std::move(point));
    }
    return curve;
}

}  // namespace

SelectionResult sweep_stage(const Dataset& ds, const GlobalRanking& ranking,
                            std::span<const std::size_t> confirmed,
                            const PipelineConfig& config) {
    if (confirmed.empty()) throw InvalidArgument("sweep_stage: empty confirmed set");
    if (ranking.order.size() != confirmed.size())
        throw InvalidArgument("sweep_stage: ranking does not cover the confirmed set");

    const auto start = Clock::now();

    // Ranking positions index into the confirmed set; resolve to original ids.
    std::vector<std::size_t> ranked_features(ranking.order.size());
    for (std::size_t i = 0; i < ranking.order.size(); ++i)
        ranked_features[i] = confirmed[ranking.order[i]];

    const auto k_values =
        sweep_k_values(config.k_min, config.k_step, static_cast<int>(ranked_features.size()));

    SelectionResult result;
    result.ranking = ranking;
    result.confirmed_indices.assign(confirmed.begin(), confirmed.end());

    if (config.protocol.cv_folds >= 2) {
        result.curve = sweep_curve_cv(ds, ranked_features, config.classifier, k_values, config);
    } else {
        const SplitPair split = stratified_split(ds, config.protocol.holdout_fraction,
                                                 derive_seed(config.seed, "split"));
        result.curve = sweep_curve(split, ranked_features, config.classifier, k_values,
                                   config.seed, config.n_threads);
    }

    const std::size_t best = pick_best(result.curve);
    result.k_star = result.curve[best].k;
    result.best_accuracy = result.curve[best].metrics.accuracy;
    result.selected_indices.assign(ranked_features.begin(),
                                   ranked_features.begin() + result.k_star);
    for (std::size_t j : result.selected_indices)
        result.selected_names.push_back(ds.feature_names[j]);

    // Refit the winning configuration so the returned model is the one the
    // curve measured (holdout) or a full-data final model (cv).
    const std::span<const std::size_t> top(result.selected_indices.data(),
                                           result.selected_indices.size());
    if (config.protocol.cv_folds >= 2) {
        const Dataset full_k = ds.select_columns(top);
        result.best_model =
            train_classifier(config.classifier, full_k.x, full_k.labels, ds.n_classes(),
                             derive_seed(config.seed, "sweep/final"), config.n_threads);
    } else {
        const SplitPair split = stratified_split(ds, config.protocol.holdout_fraction,
                                                 derive_seed(config.seed, "split"));
        const Matrix x_train = split.train.x.select_columns(top);
        result.best_model = train_classifier(
            config.classifier, x_train, split.train.labels, split.train.n_classes(),
            derive_seed(config.seed, "sweep/k=" + std::to_string(result.k_star)),
            config.n_threads);
    }

    result.sweep_s = seconds_since(start);
    return result;
}

BorutaResult run_boruta_stage(const Dataset& ds, const PipelineConfig& config) {
    BorutaParams params = config.boruta;
    params.seed = derive_seed(config.seed, "boruta");
    // Filtering runs on the full matrix by default; selection_on_train_only
    // restricts the stage to the training rows for leak-free evaluation.
    if (config.selection_on_train_only && config.protocol.cv_folds < 2) {
        const SplitPair split = stratified_split(ds, config.protocol.holdout_fraction,
                                                 derive_seed(config.seed, "split"));
        return boruta_run(split.train, params, config.n_threads);
    }
    return boruta_run(ds, params, config.n_threads);
}

SelectionResult run_bolimes(const Dataset& ds, const PipelineConfig& config) {
    config.validate();
    ds.validate();

    BorutaResult boruta = run_boruta_stage(ds, config);
    const auto confirmed = boruta.confirmed_indices();
    if (confirmed.empty()) throw NoRelevantFeatures(std::move(boruta));

    // Stage 2: LIME ranking of the confirmed set.
    const auto lime_start = Clock::now();
    const GlobalRanking ranking = rank_features(ds, confirmed, config);
    const double lime_s = seconds_since(lime_start);

    // Stage 3: top-k sweep.
    SelectionResult result = sweep_stage(ds, ranking, confirmed, config);
    result.boruta_s = boruta.elapsed_s;
    result.lime_s = lime_s;
    result.boruta = std::move(boruta);
    return result;
}

}  // namespace bolimes
