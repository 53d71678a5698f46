#include "bolimes/boruta.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/forest.hpp"
#include "bolimes/rng.hpp"

namespace bolimes {

std::string to_string(FeatureStatus s) {
    switch (s) {
        case FeatureStatus::Confirmed:
            return "confirmed";
        case FeatureStatus::Tentative:
            return "tentative";
        case FeatureStatus::Rejected:
            return "rejected";
    }
    return "tentative";
}

FeatureStatus feature_status_from_string(const std::string& s) {
    if (s == "confirmed") return FeatureStatus::Confirmed;
    if (s == "rejected") return FeatureStatus::Rejected;
    if (s == "tentative") return FeatureStatus::Tentative;
    throw InvalidArgument("unknown feature status: " + s);
}

void BorutaParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidArgument("boruta: alpha must be in (0, 1)");
    if (!(percentile >= 1.0 && percentile <= 100.0))
        throw InvalidArgument("boruta: percentile must be in [1, 100]");
    if (max_iter < 1) throw InvalidArgument("boruta: max_iter must be >= 1");
    if (n_estimators < 1) throw InvalidArgument("boruta: n_estimators must be >= 1");
}

std::size_t BorutaResult::count(FeatureStatus s) const {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), s));
}

std::vector<std::size_t> BorutaResult::confirmed_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < status.size(); ++j)
        if (status[j] == FeatureStatus::Confirmed) out.push_back(j);
    return out;
}

Matrix make_shadow(const Matrix& x, std::uint64_t seed) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    Matrix out(n, 2 * p);
    std::vector<double> column(n);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = x(i, j);
            out(i, j) = column[i];
        }
        const auto shuffled = permute(column, child_seed(seed, j));
        for (std::size_t i = 0; i < n; ++i) out(i, p + j) = shuffled[i];
    }
    return out;
}

double shadow_threshold(std::span<const double> shadow_importances, double percentile) {
    if (shadow_importances.empty())
        throw InvalidArgument("shadow_threshold: empty importance list");
    if (!(percentile >= 1.0 && percentile <= 100.0))
        throw InvalidArgument("shadow_threshold: percentile must be in [1, 100]");
    std::vector<double> sorted(shadow_importances.begin(), shadow_importances.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = sorted.size();
    // Nearest-rank: the ceil(perc/100 * m)-th order statistic, 1-based.
    auto rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(m) - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, m);
    return sorted[rank - 1];
}

namespace {

// Tail sums accumulate pmf terms by the multiplicative recurrence in long
// double; exact to well below 1e-12 for the trial counts Boruta reaches.
long double binom_tail(int from, int to, int trials) {
    long double pmf = std::pow(0.5L, trials);  // pmf(0)
    long double total = 0.0L;
    for (int k = 0; k <= to; ++k) {
        if (k >= from) total += pmf;
        pmf *= static_cast<long double>(trials - k) / static_cast<long double>(k + 1);
    }
    return total;
}

}  // namespace

double binomial_upper_tail(int hits, int trials) {
    if (trials < 1 || hits < 0 || hits > trials)
        throw InvalidArgument("binomial_upper_tail: need 0 <= hits <= trials, trials >= 1");
    return static_cast<double>(binom_tail(hits, trials, trials));
}

double binomial_lower_tail(int hits, int trials) {
    if (trials < 1 || hits < 0 || hits > trials)
        throw InvalidArgument("binomial_lower_tail: need 0 <= hits <= trials, trials >= 1");
    return static_cast<double>(binom_tail(0, hits, trials));
}

namespace {

// Benjamini-Hochberg: true entries mark p-values significant at level alpha.
std::vector<bool> bh_significant(std::span<const double> pvalues, double alpha) {
    const std::size_t m = pvalues.size();
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    double cutoff = -1.0;
    for (std::size_t i = m; i > 0; --i) {
        const double threshold = alpha * static_cast<double>(i) / static_cast<double>(m);
        if (pvalues[order[i - 1]] <= threshold) {
            cutoff = pvalues[order[i - 1]];
            break;
        }
    }
    std::vector<bool> significant(m, false);
    if (cutoff >= 0.0)
        for (std::size_t i = 0; i < m; ++i) significant[i] = pvalues[i] <= cutoff;
    return significant;
}

}  // namespace

std::vector<FeatureStatus> decide_features(std::span<const int> hits, int trials, double alpha,
                                           bool two_step, std::size_t total_features) {
    if (trials < 1) throw InvalidArgument("decide_features: trials must be >= 1");
    const std::size_t m = hits.size();
    std::vector<double> p_up(m);
    std::vector<double> p_down(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (hits[i] < 0 || hits[i] > trials)
            throw InvalidArgument("decide_features: hits out of [0, trials]");
        p_up[i] = binomial_upper_tail(hits[i], trials);
        p_down[i] = binomial_lower_tail(hits[i], trials);
    }

    std::vector<bool> confirm(m, false);
    std::vector<bool> reject(m, false);
    if (two_step) {
        const auto bh_up = bh_significant(p_up, alpha);
        const auto bh_down = bh_significant(p_down, alpha);
        const double bonferroni = alpha / static_cast<double>(trials);
        for (std::size_t i = 0; i < m; ++i) {
            confirm[i] = bh_up[i] && p_up[i] <= bonferroni;
            reject[i] = bh_down[i] && p_down[i] <= bonferroni;
        }
    } else {
        const double bonferroni = alpha / static_cast<double>(std::max<std::size_t>(1, total_features));
        for (std::size_t i = 0; i < m; ++i) {
            confirm[i] = p_up[i] <= bonferroni;
            reject[i] = p_down[i] <= bonferroni;
        }
    }

    std::vector<FeatureStatus> out(m, FeatureStatus::Tentative);
    for (std::size_t i = 0; i < m; ++i) {
        if (confirm[i])
            out[i] = FeatureStatus::Confirmed;
        else if (reject[i])
            out[i] = FeatureStatus::Rejected;
    }
    return out;
}

FeatureStatus hit_decision(int hits, int trials, double alpha, bool two_step) {
    const int h = hits;
    return decide_features(std::span<const int>(&h, 1), trials, alpha, two_step, 1)[0];
}

BorutaResult boruta_run(const Dataset& ds, const BorutaParams& params, int n_threads) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();

    const std::size_t p = ds.n_features();
    BorutaResult result;
    result.status.assign(p, FeatureStatus::Tentative);
    result.hits.assign(p, 0);
    result.trials.assign(p, 0);

    // Undecided features are tracked separately from the reported status so
    // that confirmed features stay in the forest until the loop ends.
    std::vector<bool> decided(p, false);
    std::size_t n_undecided = p;

    ForestParams forest_params;
    forest_params.n_estimators = params.n_estimators;
    forest_params.tree = params.tree;
    forest_params.bootstrap = true;

    std::vector<std::size_t> active;  // confirmed + undecided
    active.reserve(p);
    for (std::size_t j = 0; j < p; ++j) active.push_back(j);

    // The shadow pool spans every original feature each iteration, not just
    // the surviving ones. A pool that shrank with the active set would weaken
    // the null reference late in the run and let merely lucky survivors
    // accumulate hits against a handful of shadows.
    std::vector<std::size_t> columns;
    columns.reserve(2 * p);

    for (int iter = 1; iter <= params.max_iter && n_undecided > 0; ++iter) {
        result.iterations_run = iter;
        const std::string iter_tag = "boruta/iter=" + std::to_string(iter);

        const Matrix x_aug =
            make_shadow(ds.x, derive_seed(params.seed, iter_tag + "/shadow"));
        columns.assign(active.begin(), active.end());
        for (std::size_t j = 0; j < p; ++j) columns.push_back(p + j);
        const Matrix x_iter = x_aug.select_columns(columns);
        forest_params.seed = derive_seed(params.seed, iter_tag + "/forest");

        const RandomForest forest =
            RandomForest::train(x_iter, ds.labels, ds.n_classes(), forest_params, n_threads);
        // Hits compare importance z-scores, not raw impurity credit: a noise
        // column that happens to correlate with y in this sample wins big in
        // a lucky minority of trees, and the across-tree deviation discounts
        // exactly that.
        const std::vector<double> zscores = forest.importance_zscores();

        const std::size_t n_active = active.size();
        const std::span<const double> shadow_z(zscores.data() + n_active, p);
        const double threshold = shadow_threshold(shadow_z, params.percentile);
        result.shadow_thresholds.push_back(threshold);

        std::vector<std::size_t> undecided;
        std::vector<int> undecided_hits;
        for (std::size_t pos = 0; pos < n_active; ++pos) {
            const std::size_t j = active[pos];
            if (decided[j]) continue;
            ++result.trials[j];
            if (zscores[pos] > threshold) ++result.hits[j];
            undecided.push_back(j);
            undecided_hits.push_back(result.hits[j]);
        }

        const auto decisions =
            decide_features(undecided_hits, iter, params.alpha, params.two_step, p);
        bool any_rejected = false;
        for (std::size_t i = 0; i < undecided.size(); ++i) {
            if (decisions[i] == FeatureStatus::Tentative) continue;
            const std::size_t j = undecided[i];
            result.status[j] = decisions[i];
            decided[j] = true;
            --n_undecided;
            if (decisions[i] == FeatureStatus::Rejected) any_rejected = true;
        }
        if (any_rejected) {
            active.erase(std::remove_if(active.begin(), active.end(),
                                        [&](std::size_t j) {
                                            return result.status[j] == FeatureStatus::Rejected;
                                        }),
                         active.end());
        }
    }

    result.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace bolimes
