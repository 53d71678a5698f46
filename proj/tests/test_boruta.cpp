#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bolimes/boruta.hpp"
#include "bolimes/dataset.hpp"
#include "bolimes/errors.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

namespace {

// Exact binomial tail oracle: integer sums of C(n,k) in 128-bit arithmetic,
// exact for n <= 64 (the full row sums to 2^n <= 2^64).
double exact_upper_tail(int hits, int trials) {
    unsigned __int128 sum = 0;
    unsigned __int128 c = 1;  // C(n, 0)
    for (int k = 0; k <= trials; ++k) {
        if (k >= hits) sum += c;
        c = c * static_cast<unsigned>(trials - k) / static_cast<unsigned>(k + 1);
    }
    return static_cast<double>(static_cast<long double>(sum) /
                               std::pow(2.0L, trials));
}

double exact_lower_tail(int hits, int trials) {
    unsigned __int128 sum = 0;
    unsigned __int128 c = 1;
    for (int k = 0; k <= hits; ++k) {
        sum += c;
        c = c * static_cast<unsigned>(trials - k) / static_cast<unsigned>(k + 1);
    }
    return static_cast<double>(static_cast<long double>(sum) /
                               std::pow(2.0L, trials));
}

}  // namespace

TEST_CASE("binomial tails match the exact integer oracle for all trials <= 64") {
    for (int trials = 1; trials <= 64; ++trials)
        for (int hits = 0; hits <= trials; ++hits) {
            CHECK(std::abs(binomial_upper_tail(hits, trials) - exact_upper_tail(hits, trials)) <
                  1e-12);
            CHECK(std::abs(binomial_lower_tail(hits, trials) - exact_lower_tail(hits, trials)) <
                  1e-12);
        }
}

TEST_CASE("hit_decision on the spec examples") {
    CHECK(hit_decision(20, 20, 0.01, true) == FeatureStatus::Confirmed);
    CHECK(hit_decision(10, 20, 0.01, true) == FeatureStatus::Tentative);
    CHECK(hit_decision(0, 20, 0.01, true) == FeatureStatus::Rejected);
    // identical decisions with the plain Bonferroni variant at m=1
    CHECK(hit_decision(20, 20, 0.01, false) == FeatureStatus::Confirmed);
    CHECK(hit_decision(10, 20, 0.01, false) == FeatureStatus::Tentative);
    CHECK(hit_decision(0, 20, 0.01, false) == FeatureStatus::Rejected);
    // tail values behind the first example
    CHECK(binomial_upper_tail(20, 20) == doctest::Approx(9.5367431640625e-7).epsilon(1e-12));
}

TEST_CASE("decision monotonicity holds exhaustively for trials <= 64") {
    for (const bool two_step : {true, false})
        for (int trials = 1; trials <= 64; ++trials) {
            bool seen_confirm = false;
            bool left_reject = false;
            FeatureStatus prev = FeatureStatus::Rejected;
            for (int hits = 0; hits <= trials; ++hits) {
                const auto d = hit_decision(hits, trials, 0.01, two_step);
                if (hits == 0) {
                    prev = d;
                    left_reject = d != FeatureStatus::Rejected;
                    seen_confirm = d == FeatureStatus::Confirmed;
                    continue;
                }
                // once out of Rejected it never returns; once Confirmed it stays
                if (prev != FeatureStatus::Rejected) CHECK(d != FeatureStatus::Rejected);
                if (prev == FeatureStatus::Confirmed) CHECK(d == FeatureStatus::Confirmed);
                prev = d;
                (void)seen_confirm;
                (void)left_reject;
            }
        }
}

TEST_CASE("hit_decision validates input") {
    CHECK_THROWS_AS(hit_decision(5, 0, 0.01, true), InvalidArgument);
    CHECK_THROWS_AS(hit_decision(-1, 10, 0.01, true), InvalidArgument);
    CHECK_THROWS_AS(hit_decision(11, 10, 0.01, true), InvalidArgument);
}

TEST_CASE("decide_features applies BH jointly across undecided features") {
    // Nine strong features and one middling one: BH confirms the strong block,
    // leaves the middling one tentative.
    std::vector<int> hits{20, 20, 20, 20, 20, 20, 20, 20, 20, 13};
    const auto decisions = decide_features(hits, 20, 0.01, true, 500);
    for (int i = 0; i < 9; ++i) CHECK(decisions[static_cast<std::size_t>(i)] == FeatureStatus::Confirmed);
    CHECK(decisions[9] == FeatureStatus::Tentative);
}

TEST_CASE("make_shadow doubles the column count with multiset-equal shadows") {
    Rng rng(6);
    Matrix x(50, 3);
    for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.next_gaussian();
    const Matrix aug = make_shadow(x, 99);
    REQUIRE(aug.cols() == 6);
    REQUIRE(aug.rows() == 50);
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> original, shadow;
        bool identical = true;
        for (std::size_t i = 0; i < 50; ++i) {
            CHECK(aug(i, j) == x(i, j));
            original.push_back(x(i, j));
            shadow.push_back(aug(i, j + 3));
            identical = identical && aug(i, j + 3) == x(i, j);
        }
        std::sort(original.begin(), original.end());
        std::sort(shadow.begin(), shadow.end());
        CHECK(original == shadow);
        CHECK_FALSE(identical);  // 50 elements never permute to identity here
    }
}

TEST_CASE("shadow columns lose label association on planted data") {
    SyntheticSpec spec;
    spec.n_samples = 500;
    spec.n_informative = 3;
    spec.n_noise = 3;
    spec.n_classes = 2;
    spec.class_separation = 2.5;
    spec.seed = 9;
    auto [ds, informative] = synthesize(spec);
    const Matrix aug = make_shadow(ds.x, 5);
    auto corr = [&](std::size_t col) {
        double mx = 0, my = 0;
        const auto n = static_cast<double>(ds.n_samples());
        for (std::size_t i = 0; i < ds.n_samples(); ++i) {
            mx += aug(i, col);
            my += ds.labels[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < ds.n_samples(); ++i) {
            const double dx = aug(i, col) - mx;
            const double dy = ds.labels[i] - my;
            sxy += dx * dy;
            sxx += dx * dx;
            syy += dy * dy;
        }
        return std::abs(sxy / std::sqrt(sxx * syy));
    };
    for (std::size_t j : informative) CHECK(corr(j + 6) < corr(j));
}

TEST_CASE("shadow_threshold nearest-rank percentiles") {
    const std::vector<double> imps{0.1, 0.3, 0.2};
    CHECK(shadow_threshold(imps, 100.0) == 0.3);
    CHECK(shadow_threshold(imps, 50.0) == 0.2);  // ceil(0.5*3) = 2nd order statistic
    const std::vector<double> one{0.42};
    CHECK(shadow_threshold(one, 100.0) == 0.42);
    CHECK(shadow_threshold(one, 1.0) == 0.42);
    CHECK_THROWS_AS(shadow_threshold(std::vector<double>{}, 100.0), InvalidArgument);
}

TEST_CASE("boruta_run on planted data: partition, recovery, determinism") {
    SyntheticSpec spec;
    spec.n_samples = 120;
    spec.n_informative = 5;
    spec.n_noise = 75;
    spec.n_classes = 2;
    spec.class_separation = 2.5;
    spec.seed = 13;
    auto [ds, informative] = synthesize(spec);

    BorutaParams params;
    params.n_estimators = 100;
    params.max_iter = 50;
    params.seed = 42;
    const BorutaResult result = boruta_run(ds, params, 2);

    CHECK(result.status.size() == ds.n_features());
    CHECK(result.count(FeatureStatus::Confirmed) + result.count(FeatureStatus::Tentative) +
              result.count(FeatureStatus::Rejected) ==
          ds.n_features());
    CHECK(result.iterations_run <= 50);
    CHECK(result.shadow_thresholds.size() == static_cast<std::size_t>(result.iterations_run));
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        CHECK(result.hits[j] <= result.trials[j]);
        CHECK(result.trials[j] <= result.iterations_run);
    }

    const auto confirmed = result.confirmed_indices();
    std::size_t recovered = 0;
    for (std::size_t j : informative)
        if (std::find(confirmed.begin(), confirmed.end(), j) != confirmed.end()) ++recovered;
    CHECK(recovered >= 4);  // 5 planted at high separation

    SUBCASE("same seed and threads do not change the outcome") {
        const BorutaResult again = boruta_run(ds, params, 1);
        CHECK(again.status == result.status);
        CHECK(again.hits == result.hits);
        CHECK(again.shadow_thresholds == result.shadow_thresholds);
    }
}

TEST_CASE("a label-derived column confirms fast; a constant column never does") {
    Rng rng(31);
    const std::size_t n = 100;
    Dataset ds;
    ds.name = "leak";
    ds.x = Matrix(n, 40);
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels.push_back(static_cast<int>(i % 2));
        ds.x(i, 0) = static_cast<double>(ds.labels[i]);  // the label itself
        ds.x(i, 1) = 7.5;                                // constant
        for (std::size_t j = 2; j < 40; ++j) ds.x(i, j) = rng.next_gaussian();
    }
    for (std::size_t j = 0; j < 40; ++j) ds.feature_names.push_back("f" + std::to_string(j));
    ds.class_names = {"a", "b"};

    BorutaParams params;
    params.n_estimators = 80;
    params.max_iter = 40;
    params.seed = 3;
    const BorutaResult result = boruta_run(ds, params, 2);
    CHECK(result.status[0] == FeatureStatus::Confirmed);
    CHECK(result.trials[0] <= 25);
    CHECK(result.status[1] != FeatureStatus::Confirmed);
}
