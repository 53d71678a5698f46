#include "bolimes/gbt.hpp"

#include <algorithm>
#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

namespace {

constexpr double kProbFloor = 1e-15;

void softmax_inplace(std::span<double> scores) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - peak);
        total += s;
    }
    for (auto& s : scores) s /= total;
}

double log_loss(const Matrix& probs, std::span<const int> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        total -= std::log(std::max(probs(i, static_cast<std::size_t>(y[i])), kProbFloor));
    return total / static_cast<double>(y.size());
}

}  // namespace

GradientBoosted GradientBoosted::train(const Matrix& x, std::span<const int> y, int n_classes,
                                       const GbtParams& params, std::uint64_t seed) {
    (void)seed;
    if (x.rows() != y.size()) throw InvalidArgument("train_gbt: X and y row counts differ");
    if (x.rows() == 0) throw InvalidArgument("train_gbt: empty training set");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
        throw InvalidArgument("train_gbt: learning_rate must be in (0, 1]");
    if (params.n_estimators < 1) throw InvalidArgument("train_gbt: n_estimators must be >= 1");

    const std::size_t n = x.rows();
    const auto k = static_cast<std::size_t>(n_classes);

    GradientBoosted model;
    model.n_classes_ = n_classes;
    model.n_features_ = x.cols();
    model.learning_rate_ = params.learning_rate;

    model.base_scores_.assign(k, 0.0);
    for (int label : y) model.base_scores_[static_cast<std::size_t>(label)] += 1.0;
    for (auto& s : model.base_scores_)
        s = std::log(std::max(s / static_cast<double>(n), kProbFloor));

    Matrix scores(n, k);
    for (std::size_t i = 0; i < n; ++i)
        std::copy(model.base_scores_.begin(), model.base_scores_.end(), scores.row(i).begin());

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_leaf = 1;
    tree_params.candidate_features = FeatureSubset::all();

    Matrix probs(n, k);
    std::vector<double> residual(n);
    std::vector<int> leaf_of(n);

    auto refresh_probs = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            auto row = probs.row(i);
            std::copy(scores.row(i).begin(), scores.row(i).end(), row.begin());
            softmax_inplace(row);
        }
    };

    refresh_probs();
    model.stage_losses_.push_back(log_loss(probs, y));

    const double class_scale =
        n_classes > 1 ? static_cast<double>(n_classes - 1) / static_cast<double>(n_classes) : 1.0;

    for (int stage = 0; stage < params.n_estimators; ++stage) {
        auto& stage_trees = model.stages_.emplace_back();
        stage_trees.reserve(k);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i)
                residual[i] =
                    (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0) - probs(i, c);

            RegressionTree tree = RegressionTree::train(x, residual, tree_params, 0);

            // Newton leaf step for the multiclass deviance:
            // gamma = (K-1)/K * sum(r) / sum(|r| (1 - |r|)).
            std::vector<double> num(tree.n_nodes(), 0.0);
            std::vector<double> den(tree.n_nodes(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const int leaf = tree.leaf_index_row(x.row(i));
                leaf_of[i] = leaf;
                const double r = residual[i];
                const double a = std::abs(r);
                num[static_cast<std::size_t>(leaf)] += r;
                den[static_cast<std::size_t>(leaf)] += a * (1.0 - a);
            }
            for (std::size_t node = 0; node < tree.n_nodes(); ++node) {
                if (!tree.is_leaf(static_cast<int>(node))) continue;
                const double gamma =
                    den[node] > kProbFloor ? class_scale * num[node] / den[node] : 0.0;
                tree.set_leaf_value(static_cast<int>(node), gamma);
            }
            for (std::size_t i = 0; i < n; ++i)
                scores(i, c) += params.learning_rate * tree.leaf_value(leaf_of[i]);
            stage_trees.push_back(std::move(tree));
        }
        refresh_probs();
        model.stage_losses_.push_back(log_loss(probs, y));
    }
    return model;
}

void GradientBoosted::scores_row(std::span<const double> row, std::span<double> out) const {
    std::copy(base_scores_.begin(), base_scores_.end(), out.begin());
    for (const auto& stage : stages_)
        for (std::size_t c = 0; c < stage.size(); ++c)
            out[c] += learning_rate_ * stage[c].predict_row(row);
}

int GradientBoosted::predict_row(std::span<const double> row) const {
    std::vector<double> scores(static_cast<std::size_t>(n_classes_));
    scores_row(row, scores);
    return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

void GradientBoosted::predict_proba_row(std::span<const double> row, std::span<double> out) const {
    scores_row(row, out);
    softmax_inplace(out);
}

}  // namespace bolimes
