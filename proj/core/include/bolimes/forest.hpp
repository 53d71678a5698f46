#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bolimes/matrix.hpp"
#include "bolimes/tree.hpp"

namespace bolimes {

struct ForestParams {
    int n_estimators = 200;
    TreeParams tree{};
    bool bootstrap = true;
    std::uint64_t seed = 42;
};

/// Per-feature mean decrease in impurity, normalized to sum to one when any
/// split occurred (all zeros otherwise).
struct ImportanceScores {
    std::vector<double> values;
};

/// Bootstrap ensemble of CART trees. Prediction is the majority vote over
/// tree argmax outputs with ties to the lower class id; probabilities are the
/// vote fractions. Tree seeds are pre-derived from the forest seed, so
/// training is parallel-safe and schedule-independent.
class RandomForest {
public:
    static RandomForest train(const Matrix& x, std::span<const int> y, int n_classes,
                              const ForestParams& params, int n_threads = 0);

    int predict_row(std::span<const double> row) const;
    void predict_proba_row(std::span<const double> row, std::span<double> out) const;

    ImportanceScores feature_importances() const;

    /// Per-feature z-score of the impurity credit across trees (mean of the
    /// per-tree-normalized credits over their standard deviation, zero for
    /// never-split features). Rewards features that matter consistently in
    /// every tree over ones that win big in a lucky few.
    std::vector<double> importance_zscores() const;

    int n_classes() const { return n_classes_; }
    std::size_t n_features() const { return n_features_; }
    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    std::vector<DecisionTree> trees_;
    int n_classes_ = 0;
    std::size_t n_features_ = 0;
};

}  // namespace bolimes
