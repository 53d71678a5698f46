#include "bolimes/tree.hpp"

#include <algorithm>
#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

std::size_t FeatureSubset::resolve(std::size_t n_features) const {
    switch (mode) {
        case Mode::All:
            return n_features;
        case Mode::Count: {
            if (count < 1) throw InvalidArgument("FeatureSubset: count must be >= 1");
            return std::min<std::size_t>(static_cast<std::size_t>(count), n_features);
        }
        case Mode::Sqrt:
        default: {
            const auto s = static_cast<std::size_t>(
                std::sqrt(static_cast<double>(n_features)));
            return std::max<std::size_t>(1, std::min(s, n_features));
        }
    }
}

namespace {

constexpr double kMinGain = 1e-12;

double gini_from_counts(std::span<const std::size_t> counts, std::size_t n) {
    if (n == 0) return 0.0;
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += f * f;
    }
    return 1.0 - sum_sq;
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    // Impurity decrease within the node. Gini is concave, so any valid split
    // is >= 0 up to rounding; impure nodes may take a zero-gain split (the
    // children can still become separable deeper, e.g. on xor-like data).
    double local_gain = -1.0;
};

// Shared machinery for classification and regression trees: index buffers,
// per-node candidate-feature sampling, sorted threshold scans.
class BuilderBase {
public:
    BuilderBase(const Matrix& x, const TreeParams& params, std::uint64_t seed)
        : x_(x), params_(params), rng_(seed), feature_pool_(x.cols()) {
        for (std::size_t j = 0; j < x.cols(); ++j) feature_pool_[j] = j;
    }

protected:
    // Sample n_cand distinct features in seeded random order. Equal-gain ties
    // resolve to the first candidate in this order; a positional rule (e.g.
    // always the lowest index) would systematically inflate low-index
    // importances, which breaks the exchangeability of shadow features.
    std::span<const std::size_t> sample_candidates() {
        const std::size_t n_cand = params_.candidate_features.resolve(x_.cols());
        for (std::size_t i = 0; i < n_cand; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng_.next_below(feature_pool_.size() - i));
            std::swap(feature_pool_[i], feature_pool_[j]);
        }
        candidates_.assign(feature_pool_.begin(),
                           feature_pool_.begin() + static_cast<std::ptrdiff_t>(n_cand));
        return candidates_;
    }

    const Matrix& x_;
    TreeParams params_;
    Rng rng_;
    std::vector<std::size_t> indices_;  // sample indices, partitioned in place

private:
    std::vector<std::size_t> feature_pool_;
    std::vector<std::size_t> candidates_;
};

class ClassificationBuilder : public BuilderBase {
public:
    ClassificationBuilder(const Matrix& x, std::span<const int> y, int n_classes,
                          const TreeParams& params, std::uint64_t seed)
        : BuilderBase(x, params, seed),
          y_(y),
          k_(static_cast<std::size_t>(n_classes)),
          node_counts_(k_),
          left_counts_(k_) {}

    std::vector<TreeNode> build(std::vector<std::size_t> indices) {
        indices_ = std::move(indices);
        n_total_ = indices_.size();
        nodes_.clear();
        grow(0, indices_.size(), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::size_t begin, std::size_t end, int depth) {
        const std::size_t n = end - begin;
        std::fill(node_counts_.begin(), node_counts_.end(), 0);
        for (std::size_t i = begin; i < end; ++i)
            ++node_counts_[static_cast<std::size_t>(y_[indices_[i]])];

        const double node_gini = gini_from_counts(node_counts_, n);
        const bool pure = node_gini == 0.0;
        const bool at_limit = depth >= params_.max_depth ||
                              n < 2 * static_cast<std::size_t>(params_.min_samples_leaf);

        BestSplit best;
        if (!pure && !at_limit) best = search_split(begin, end, node_gini);
        if (!best.found) return make_leaf(n);

        const int node_id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        {
            TreeNode& node = nodes_.back();
            node.feature = static_cast<int>(best.feature);
            node.threshold = best.threshold;
            node.n_samples = n;
            node.gain = best.local_gain * static_cast<double>(n) / static_cast<double>(n_total_);
        }
        const auto mid = std::partition(indices_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        indices_.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t i) {
                                            return x_(i, best.feature) <= best.threshold;
                                        }) -
                         indices_.begin();
        const int left = grow(begin, static_cast<std::size_t>(mid), depth + 1);
        const int right = grow(static_cast<std::size_t>(mid), end, depth + 1);
        nodes_[static_cast<std::size_t>(node_id)].left = left;
        nodes_[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    int make_leaf(std::size_t n) {
        const int node_id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        TreeNode& node = nodes_.back();
        node.n_samples = n;
        node.class_probs.resize(k_);
        for (std::size_t c = 0; c < k_; ++c)
            node.class_probs[c] =
                n == 0 ? 0.0 : static_cast<double>(node_counts_[c]) / static_cast<double>(n);
        return node_id;
    }

    BestSplit search_split(std::size_t begin, std::size_t end, double node_gini) {
        const std::size_t n = end - begin;
        const auto msl = static_cast<std::size_t>(params_.min_samples_leaf);
        BestSplit best;
        // node_counts_ is consumed as the running right-side count below, so
        // keep a copy for restoring between features.
        parent_counts_.assign(node_counts_.begin(), node_counts_.end());

        for (std::size_t f : sample_candidates()) {
            scratch_.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t s = indices_[i];
                scratch_.emplace_back(x_(s, f), y_[s]);
            }
            std::sort(scratch_.begin(), scratch_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (scratch_.front().first == scratch_.back().first) continue;

            std::fill(left_counts_.begin(), left_counts_.end(), 0);
            std::size_t n_left = 0;
            std::vector<std::size_t>& right = node_counts_;
            right.assign(parent_counts_.begin(), parent_counts_.end());

            for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
                const auto cls = static_cast<std::size_t>(scratch_[i].second);
                ++left_counts_[cls];
                --right[cls];
                ++n_left;
                if (scratch_[i].first == scratch_[i + 1].first) continue;
                const std::size_t n_right = n - n_left;
                if (n_left < msl || n_right < msl) continue;
                const double gain =
                    node_gini -
                    (static_cast<double>(n_left) / static_cast<double>(n)) *
                        gini_from_counts(left_counts_, n_left) -
                    (static_cast<double>(n_right) / static_cast<double>(n)) *
                        gini_from_counts(right, n_right);
                // Strictly-better acceptance keeps the first candidate in
                // sampled order and the lowest threshold among ties.
                if (gain > best.local_gain + kMinGain || !best.found) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = scratch_[i].first +
                                     0.5 * (scratch_[i + 1].first - scratch_[i].first);
                    best.local_gain = std::max(gain, 0.0);
                }
            }
            node_counts_.assign(parent_counts_.begin(), parent_counts_.end());
        }
        return best;
    }

    std::span<const int> y_;
    std::size_t k_;
    std::size_t n_total_ = 0;
    std::vector<std::size_t> node_counts_;
    std::vector<std::size_t> parent_counts_;
    std::vector<std::size_t> left_counts_;
    std::vector<std::pair<double, int>> scratch_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree DecisionTree::train(const Matrix& x, std::span<const int> y, int n_classes,
                                 const TreeParams& params, std::uint64_t seed) {
    std::vector<std::size_t> indices(x.rows());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    return train_on_rows(x, y, n_classes, params, seed, std::move(indices));
}

DecisionTree DecisionTree::train_on_rows(const Matrix& x, std::span<const int> y, int n_classes,
                                         const TreeParams& params, std::uint64_t seed,
                                         std::vector<std::size_t> rows) {
    if (x.rows() != y.size()) throw InvalidArgument("train_tree: X and y row counts differ");
    if (rows.empty()) throw InvalidArgument("train_tree: empty training set");
    if (params.max_depth < 1 || params.min_samples_leaf < 1)
        throw InvalidArgument("train_tree: max_depth and min_samples_leaf must be >= 1");

    DecisionTree tree;
    tree.n_classes_ = n_classes;
    tree.n_features_ = x.cols();
    ClassificationBuilder builder(x, y, n_classes, params, seed);
    tree.nodes_ = builder.build(std::move(rows));
    return tree;
}

int DecisionTree::predict_row(std::span<const double> row) const {
    const TreeNode* node = &nodes_[0];
    while (node->feature >= 0)
        node = &nodes_[static_cast<std::size_t>(
            row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                            : node->right)];
    int best = 0;
    for (int c = 1; c < n_classes_; ++c)
        if (node->class_probs[static_cast<std::size_t>(c)] >
            node->class_probs[static_cast<std::size_t>(best)])
            best = c;
    return best;
}

void DecisionTree::predict_proba_row(std::span<const double> row, std::span<double> out) const {
    const TreeNode* node = &nodes_[0];
    while (node->feature >= 0)
        node = &nodes_[static_cast<std::size_t>(
            row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                            : node->right)];
    std::copy(node->class_probs.begin(), node->class_probs.end(), out.begin());
}

void DecisionTree::accumulate_split_credit(std::span<double> credit) const {
    for (const TreeNode& node : nodes_)
        if (node.feature >= 0) credit[static_cast<std::size_t>(node.feature)] += node.gain;
}

namespace {

class RegressionBuilder : public BuilderBase {
public:
    RegressionBuilder(const Matrix& x, std::span<const double> targets, const TreeParams& params,
                      std::uint64_t seed)
        : BuilderBase(x, params, seed), targets_(targets) {}

    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;
    };

    std::vector<Node> build() {
        indices_.resize(x_.rows());
        for (std::size_t i = 0; i < indices_.size(); ++i) indices_[i] = i;
        nodes_.clear();
        grow(0, indices_.size(), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::size_t begin, std::size_t end, int depth) {
        const std::size_t n = end - begin;
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            sum += targets_[indices_[i]];
            sum_sq += targets_[indices_[i]] * targets_[indices_[i]];
        }
        const double sse = sum_sq - sum * sum / static_cast<double>(n);

        BestSplit best;
        if (sse > kMinGain && depth < params_.max_depth &&
            n >= 2 * static_cast<std::size_t>(params_.min_samples_leaf))
            best = search_split(begin, end, sum);

        const int node_id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        if (!best.found) {
            nodes_.back().value = sum / static_cast<double>(n);
            return node_id;
        }
        nodes_.back().feature = static_cast<int>(best.feature);
        nodes_.back().threshold = best.threshold;
        const auto mid = std::partition(indices_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        indices_.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](std::size_t i) {
                                            return x_(i, best.feature) <= best.threshold;
                                        }) -
                         indices_.begin();
        const int left = grow(begin, static_cast<std::size_t>(mid), depth + 1);
        const int right = grow(static_cast<std::size_t>(mid), end, depth + 1);
        nodes_[static_cast<std::size_t>(node_id)].left = left;
        nodes_[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    BestSplit search_split(std::size_t begin, std::size_t end, double total_sum) {
        const std::size_t n = end - begin;
        const auto msl = static_cast<std::size_t>(params_.min_samples_leaf);
        const double parent_score = total_sum * total_sum / static_cast<double>(n);
        BestSplit best;

        for (std::size_t f : sample_candidates()) {
            scratch_.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t s = indices_[i];
                scratch_.emplace_back(x_(s, f), targets_[s]);
            }
            std::sort(scratch_.begin(), scratch_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (scratch_.front().first == scratch_.back().first) continue;

            double left_sum = 0.0;
            std::size_t n_left = 0;
            for (std::size_t i = 0; i + 1 < scratch_.size(); ++i) {
                left_sum += scratch_[i].second;
                ++n_left;
                if (scratch_[i].first == scratch_[i + 1].first) continue;
                const std::size_t n_right = n - n_left;
                if (n_left < msl || n_right < msl) continue;
                const double right_sum = total_sum - left_sum;
                // Maximizing sum of squared child means equals minimizing SSE.
                const double gain =
                    left_sum * left_sum / static_cast<double>(n_left) +
                    right_sum * right_sum / static_cast<double>(n_right) - parent_score;
                if (gain > best.local_gain + kMinGain || !best.found) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = scratch_[i].first +
                                     0.5 * (scratch_[i + 1].first - scratch_[i].first);
                    best.local_gain = std::max(gain, 0.0);
                }
            }
        }
        return best;
    }

    std::span<const double> targets_;
    std::vector<std::pair<double, double>> scratch_;
    std::vector<Node> nodes_;
};

}  // namespace

RegressionTree RegressionTree::train(const Matrix& x, std::span<const double> targets,
                                     const TreeParams& params, std::uint64_t seed) {
    if (x.rows() != targets.size())
        throw InvalidArgument("RegressionTree: X and target row counts differ");
    if (x.rows() == 0) throw InvalidArgument("RegressionTree: empty training set");

    RegressionBuilder builder(x, targets, params, seed);
    RegressionTree tree;
    tree.n_features_ = x.cols();
    for (const auto& n : builder.build())
        tree.nodes_.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return tree;
}

double RegressionTree::predict_row(std::span<const double> row) const {
    return nodes_[static_cast<std::size_t>(leaf_index_row(row))].value;
}

int RegressionTree::leaf_index_row(std::span<const double> row) const {
    int id = 0;
    const Node* node = &nodes_[0];
    while (node->feature >= 0) {
        id = row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                             : node->right;
        node = &nodes_[static_cast<std::size_t>(id)];
    }
    return id;
}

}  // namespace bolimes
