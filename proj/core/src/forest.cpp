#include "bolimes/forest.hpp"

#include <algorithm>
#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/parallel.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

RandomForest RandomForest::train(const Matrix& x, std::span<const int> y, int n_classes,
                                 const ForestParams& params, int n_threads) {
    if (params.n_estimators < 1) throw InvalidArgument("train_forest: n_estimators must be >= 1");
    if (x.rows() != y.size()) throw InvalidArgument("train_forest: X and y row counts differ");

    RandomForest forest;
    forest.n_classes_ = n_classes;
    forest.n_features_ = x.cols();
    forest.trees_.resize(static_cast<std::size_t>(params.n_estimators));

    const std::size_t n = x.rows();
    parallel_for(forest.trees_.size(), n_threads, [&](std::size_t t) {
        const std::uint64_t tree_seed = child_seed(params.seed, t);
        std::vector<std::size_t> rows(n);
        if (params.bootstrap) {
            Rng rng(child_seed(tree_seed, 0));
            for (auto& r : rows) r = static_cast<std::size_t>(rng.next_below(n));
        } else {
            for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        }
        forest.trees_[t] = DecisionTree::train_on_rows(x, y, n_classes, params.tree,
                                                       child_seed(tree_seed, 1), std::move(rows));
    });
    return forest;
}

int RandomForest::predict_row(std::span<const double> row) const {
    std::vector<int> votes(static_cast<std::size_t>(n_classes_), 0);
    for (const auto& tree : trees_) ++votes[static_cast<std::size_t>(tree.predict_row(row))];
    int best = 0;
    for (int c = 1; c < n_classes_; ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    return best;
}

void RandomForest::predict_proba_row(std::span<const double> row, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& tree : trees_) out[static_cast<std::size_t>(tree.predict_row(row))] += 1.0;
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (auto& v : out) v *= inv;
}

std::vector<double> RandomForest::importance_zscores() const {
    std::vector<double> sum(n_features_, 0.0);
    std::vector<double> sum_sq(n_features_, 0.0);
    std::vector<double> credit(n_features_);
    for (const auto& tree : trees_) {
        std::fill(credit.begin(), credit.end(), 0.0);
        tree.accumulate_split_credit(credit);
        double total = 0.0;
        for (double c : credit) total += c;
        if (total > 0.0)
            for (auto& c : credit) c /= total;
        for (std::size_t j = 0; j < n_features_; ++j) {
            sum[j] += credit[j];
            sum_sq[j] += credit[j] * credit[j];
        }
    }
    const auto t = static_cast<double>(trees_.size());
    std::vector<double> z(n_features_, 0.0);
    for (std::size_t j = 0; j < n_features_; ++j) {
        const double mean = sum[j] / t;
        const double var = std::max(sum_sq[j] / t - mean * mean, 0.0);
        const double sd = std::sqrt(var);
        if (sd > 1e-12) z[j] = mean / sd;
    }
    return z;
}

ImportanceScores RandomForest::feature_importances() const {
    ImportanceScores scores;
    scores.values.assign(n_features_, 0.0);
    std::vector<double> credit(n_features_);
    for (const auto& tree : trees_) {
        std::fill(credit.begin(), credit.end(), 0.0);
        tree.accumulate_split_credit(credit);
        for (std::size_t j = 0; j < n_features_; ++j) scores.values[j] += credit[j];
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n_features_; ++j) {
        scores.values[j] /= static_cast<double>(trees_.size());
        total += scores.values[j];
    }
    if (total > 0.0)
        for (auto& v : scores.values) v /= total;
    return scores;
}

}  // namespace bolimes
