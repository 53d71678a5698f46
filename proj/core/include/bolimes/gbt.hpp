#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bolimes/matrix.hpp"
#include "bolimes/tree.hpp"

namespace bolimes {

struct GbtParams {
    int n_estimators = 50;
    int max_depth = 10;
    double learning_rate = 0.01;
};

/// Gradient-boosted trees on the multiclass log loss: one-vs-all regression
/// trees fit to the softmax residuals each stage, leaf values set by a
/// single Newton step, scores initialized at the class log priors. Training
/// is deterministic for fixed data; `seed` is reserved for row subsampling.
class GradientBoosted {
public:
    static GradientBoosted train(const Matrix& x, std::span<const int> y, int n_classes,
                                 const GbtParams& params, std::uint64_t seed);

    int predict_row(std::span<const double> row) const;
    void predict_proba_row(std::span<const double> row, std::span<double> out) const;

    int n_classes() const { return n_classes_; }
    std::size_t n_features() const { return n_features_; }
    int n_stages() const { return static_cast<int>(stages_.size()); }

    /// Training log loss after each boosting stage (index 0 = priors only).
    std::span<const double> stage_losses() const { return stage_losses_; }

private:
    void scores_row(std::span<const double> row, std::span<double> out) const;

    std::vector<std::vector<RegressionTree>> stages_;  // [stage][class]
    std::vector<double> base_scores_;                  // log priors
    std::vector<double> stage_losses_;
    double learning_rate_ = 0.0;
    int n_classes_ = 0;
    std::size_t n_features_ = 0;
};

}  // namespace bolimes
