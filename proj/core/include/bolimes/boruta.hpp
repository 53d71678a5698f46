#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bolimes/dataset.hpp"
#include "bolimes/matrix.hpp"
#include "bolimes/tree.hpp"

namespace bolimes {

enum class FeatureStatus { Confirmed, Tentative, Rejected };

std::string to_string(FeatureStatus s);
FeatureStatus feature_status_from_string(const std::string& s);

struct BorutaParams {
    int n_estimators = 300;
    int max_iter = 200;
    double alpha = 0.01;
    double percentile = 100.0;  // shadow reference percentile, nearest-rank
    bool two_step = true;
    std::uint64_t seed = 42;
    TreeParams tree{10, 1, FeatureSubset::sqrt()};

    void validate() const;
};

struct BorutaResult {
    std::vector<FeatureStatus> status;      // per original feature
    std::vector<int> hits;                  // frozen at decision time
    std::vector<int> trials;                // iterations spent undecided
    int iterations_run = 0;
    std::vector<double> shadow_thresholds;  // per iteration
    double elapsed_s = 0.0;

    std::size_t count(FeatureStatus s) const;
    std::vector<std::size_t> confirmed_indices() const;
};

/// Augment X with one seeded, independently permuted shadow per column:
/// output column p + i is a permutation of column i.
Matrix make_shadow(const Matrix& x, std::uint64_t seed);

/// Nearest-rank percentile of the shadow importances; percentile=100 is the
/// exact maximum.
double shadow_threshold(std::span<const double> shadow_importances, double percentile);

/// Exact binomial tails under H0: hits ~ Binomial(trials, 1/2).
double binomial_upper_tail(int hits, int trials);  // P[H >= hits]
double binomial_lower_tail(int hits, int trials);  // P[H <= hits]

/// Joint decision over the currently undecided features. With two_step,
/// Benjamini-Hochberg across the undecided p-values plus a Bonferroni second
/// step at alpha/trials; otherwise plain Bonferroni at alpha/total_features.
std::vector<FeatureStatus> decide_features(std::span<const int> hits, int trials, double alpha,
                                           bool two_step, std::size_t total_features);

/// Single-feature decision (a decision family of size one).
FeatureStatus hit_decision(int hits, int trials, double alpha, bool two_step);

/// All-relevant filtering: per iteration, regenerate one shadow per original
/// feature, train the internal forest on [active originals || all shadows],
/// count a hit for every undecided original whose importance strictly exceeds
/// the shadow threshold, then decide. Rejected features leave the active set
/// (their shadows stay in the null pool); confirmed features stay in the
/// model. Features still undecided at the end are Tentative.
BorutaResult boruta_run(const Dataset& ds, const BorutaParams& params, int n_threads = 0);

}  // namespace bolimes
