#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bolimes/boruta.hpp"
#include "bolimes/dataset.hpp"
#include "bolimes/errors.hpp"
#include "bolimes/forest.hpp"
#include "bolimes/gbt.hpp"
#include "bolimes/lime.hpp"
#include "bolimes/metrics.hpp"
#include "bolimes/model.hpp"

namespace bolimes {

enum class ClassifierKind { Forest, Gbt };

std::string to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::Forest;
    ForestParams forest{200, TreeParams{10, 1, FeatureSubset::sqrt()}, true, 42};
    GbtParams gbt{50, 10, 0.01};
};

/// Evaluation protocol: stratified holdout by default, stratified k-fold
/// cross validation when cv_folds >= 2 (metrics from the pooled confusion).
struct Protocol {
    double holdout_fraction = 0.2;
    int cv_folds = 0;
};

struct PipelineConfig {
    BorutaParams boruta{};
    LimeParams lime{};
    ClassifierSpec classifier{};
    int k_min = 10;
    int k_step = 1;
    Protocol protocol{};
    std::uint64_t seed = 42;
    bool selection_on_train_only = false;
    int n_threads = 0;

    void validate() const;
};

struct KPoint {
    int k = 0;
    MetricsReport metrics;
    double train_s = 0.0;
};

struct SelectionResult {
    int k_star = 0;
    double best_accuracy = 0.0;
    std::vector<KPoint> curve;
    std::vector<std::size_t> selected_indices;  // original feature ids, ranking order
    std::vector<std::string> selected_names;
    TrainedModel best_model;
    GlobalRanking ranking;                      // over confirmed features
    std::vector<std::size_t> confirmed_indices; // ranking order[i] indexes into this
    BorutaResult boruta;                        // empty when resuming from files
    double boruta_s = 0.0;
    double lime_s = 0.0;
    double sweep_s = 0.0;
};

/// Boruta confirmed nothing; the carried result lets callers report counts.
class NoRelevantFeatures : public Error {
public:
    explicit NoRelevantFeatures(BorutaResult result)
        : Error("boruta confirmed no relevant features"), boruta(std::move(result)) {}
    BorutaResult boruta;
};

/// Boruta stage with the pipeline's seed derivation; honors
/// selection_on_train_only by filtering on the training rows alone.
BorutaResult run_boruta_stage(const Dataset& ds, const PipelineConfig& config);

/// Rank confirmed features by aggregated local importance: train the black
/// box (a forest with the Boruta forest parameters) on the training portion
/// restricted to the confirmed set, explain every training instance, and
/// aggregate.
GlobalRanking rank_features(const Dataset& ds, std::span<const std::size_t> confirmed,
                            const PipelineConfig& config);

/// The k values visited by the sweep: min(k_min, limit), then +k_step, with
/// the full confirmed set always evaluated last.
std::vector<int> sweep_k_values(int k_min, int k_step, int limit);

/// Accuracy per k over a fixed split; each k trains the evaluation classifier
/// on the top-k ranked features and evaluates on the identical test rows.
std::vector<KPoint> sweep_curve(const SplitPair& split, std::span<const std::size_t> ranked_features,
                                const ClassifierSpec& spec, std::span<const int> k_values,
                                std::uint64_t master_seed, int n_threads = 0);

/// Index into `curve` of the best accuracy; ties go to the earlier (smaller
/// k) entry, matching a strict-improvement update rule.
std::size_t pick_best(std::span<const KPoint> curve);

/// The full pipeline: Boruta filtering, LIME ranking, top-k sweep. Returns
/// the optimal subset, the fitted classifier, the per-k curve and stage
/// timings. Deterministic in (dataset, config) regardless of thread count.
SelectionResult run_bolimes(const Dataset& ds, const PipelineConfig& config);

/// The sweep and final-selection portion, resuming from an existing ranking.
SelectionResult sweep_stage(const Dataset& ds, const GlobalRanking& ranking,
                            std::span<const std::size_t> confirmed, const PipelineConfig& config);

}  // namespace bolimes
