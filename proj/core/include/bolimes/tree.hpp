#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bolimes/matrix.hpp"

namespace bolimes {

/// How many features a node's split search may consider.
struct FeatureSubset {
    enum class Mode { Sqrt, All, Count };
    Mode mode = Mode::Sqrt;
    int count = 0;

    static FeatureSubset sqrt() { return {Mode::Sqrt, 0}; }
    static FeatureSubset all() { return {Mode::All, 0}; }
    static FeatureSubset exactly(int n) { return {Mode::Count, n}; }

    std::size_t resolve(std::size_t n_features) const;
};

struct TreeParams {
    int max_depth = 10;
    int min_samples_leaf = 1;
    FeatureSubset candidate_features{};
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t n_samples = 0;
    double gain = 0.0;                // impurity decrease weighted by n/n_total
    std::vector<double> class_probs;  // leaves only
};

/// CART classifier: greedy Gini splits over a per-node feature sample,
/// thresholds at midpoints of consecutive distinct values. Equal-gain ties
/// resolve to the first candidate in the node's seeded sampling order (and to
/// the lowest threshold within a feature), so the fit is deterministic in
/// (data multiset, params, seed) with no positional preference.
class DecisionTree {
public:
    static DecisionTree train(const Matrix& x, std::span<const int> y, int n_classes,
                              const TreeParams& params, std::uint64_t seed);

    /// Train on a row multiset (bootstrap resamples reference rows of x
    /// directly, duplicates allowed).
    static DecisionTree train_on_rows(const Matrix& x, std::span<const int> y, int n_classes,
                                      const TreeParams& params, std::uint64_t seed,
                                      std::vector<std::size_t> rows);

    int predict_row(std::span<const double> row) const;
    void predict_proba_row(std::span<const double> row, std::span<double> out) const;

    int n_classes() const { return n_classes_; }
    std::size_t n_features() const { return n_features_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

    /// Add this tree's weighted impurity decreases into `credit` (size p).
    void accumulate_split_credit(std::span<double> credit) const;

private:
    std::vector<TreeNode> nodes_;
    int n_classes_ = 0;
    std::size_t n_features_ = 0;
};

/// Regression CART on squared error, used as the base learner for boosting.
/// Leaf values are owned by the caller: train() fills them with means and the
/// booster overwrites them with Newton steps via set_leaf_value().
class RegressionTree {
public:
    static RegressionTree train(const Matrix& x, std::span<const double> targets,
                                const TreeParams& params, std::uint64_t seed);

    double predict_row(std::span<const double> row) const;
    int leaf_index_row(std::span<const double> row) const;

    std::size_t n_nodes() const { return nodes_.size(); }
    bool is_leaf(int node) const { return nodes_[static_cast<std::size_t>(node)].feature < 0; }
    double leaf_value(int node) const { return nodes_[static_cast<std::size_t>(node)].value; }
    void set_leaf_value(int node, double value) {
        nodes_[static_cast<std::size_t>(node)].value = value;
    }

private:
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;  // leaves only
    };
    std::vector<Node> nodes_;
    std::size_t n_features_ = 0;
};

}  // namespace bolimes
