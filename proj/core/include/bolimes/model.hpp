#pragma once

#include <variant>
#include <vector>

#include "bolimes/forest.hpp"
#include "bolimes/gbt.hpp"
#include "bolimes/matrix.hpp"
#include "bolimes/tree.hpp"

namespace bolimes {

enum class ModelKind { Tree, Forest, Gbt };

/// Value-semantic handle over any fitted classifier. Immutable once built;
/// prediction is pure and reentrant.
class TrainedModel {
public:
    TrainedModel() = default;
    explicit TrainedModel(DecisionTree tree) : model_(std::move(tree)) {}
    explicit TrainedModel(RandomForest forest) : model_(std::move(forest)) {}
    explicit TrainedModel(GradientBoosted gbt) : model_(std::move(gbt)) {}

    ModelKind kind() const { return static_cast<ModelKind>(model_.index()); }
    int n_classes() const;
    std::size_t n_features() const;

    int predict_row(std::span<const double> row) const;
    void predict_proba_row(std::span<const double> row, std::span<double> out) const;

    const RandomForest& forest() const;
    const GradientBoosted& gbt() const;

private:
    std::variant<DecisionTree, RandomForest, GradientBoosted> model_;
};

/// Row-wise predicted class ids; errors on feature-count mismatch.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

/// Row-wise class probabilities (n x K); each row is non-negative and sums
/// to one, argmax ties resolve to the lower class id.
Matrix predict_proba(const TrainedModel& model, const Matrix& x);

/// Mean decrease in impurity for a forest model; errors for other kinds.
ImportanceScores feature_importances(const TrainedModel& model);

}  // namespace bolimes
