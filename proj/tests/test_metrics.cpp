#include <doctest.h>

#include <cmath>

#include "bolimes/errors.hpp"
#include "bolimes/metrics.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

TEST_CASE("confusion counts true-by-predicted") {
    SUBCASE("diagonal for perfect agreement") {
        const std::vector<int> t{0, 1, 1};
        const auto cm = confusion(t, t, 2);
        CHECK(cm.at(0, 0) == 1);
        CHECK(cm.at(1, 1) == 2);
        CHECK(cm.at(0, 1) == 0);
        CHECK(cm.at(1, 0) == 0);
    }
    SUBCASE("off-diagonal for systematic confusion") {
        const std::vector<int> t{0, 0};
        const std::vector<int> p{1, 1};
        const auto cm = confusion(t, p, 2);
        CHECK(cm.at(0, 1) == 2);
        CHECK(cm.trace() == 0);
    }
    SUBCASE("row sums equal true-class counts on random vectors") {
        Rng rng(5);
        for (int trial = 0; trial < 10; ++trial) {
            const int k = 2 + static_cast<int>(rng.next_below(4));
            std::vector<int> t(100), p(100);
            std::vector<std::int64_t> expected(static_cast<std::size_t>(k), 0);
            for (std::size_t i = 0; i < 100; ++i) {
                t[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
                p[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(k)));
                ++expected[static_cast<std::size_t>(t[i])];
            }
            const auto cm = confusion(t, p, k);
            for (int c = 0; c < k; ++c) {
                std::int64_t row = 0;
                for (int j = 0; j < k; ++j) row += cm.at(c, j);
                CHECK(row == expected[static_cast<std::size_t>(c)]);
            }
        }
    }
    SUBCASE("errors") {
        const std::vector<int> t{0, 1};
        const std::vector<int> p{0};
        CHECK_THROWS_AS(confusion(t, p, 2), InvalidArgument);
        const std::vector<int> bad{0, 5};
        CHECK_THROWS_AS(confusion(t, bad, 2), InvalidArgument);
    }
}

TEST_CASE("perfect predictions score one on every metric") {
    const std::vector<int> t{0, 1, 2, 0, 1, 2};
    const auto report = weighted_metrics(confusion(t, t, 3));
    CHECK(report.accuracy == 1.0);
    CHECK(report.precision == 1.0);
    CHECK(report.recall == 1.0);
    CHECK(report.f1 == 1.0);
}

TEST_CASE("hand-computed weighted example matches to 1e-12") {
    // y_true = [0,0,1], y_pred = [0,0,0]:
    // accuracy 2/3; class 0 F1 = 4/5, class 1 F1 = 0; weighted F1 = 2/3*4/5 = 8/15.
    const std::vector<int> t{0, 0, 1};
    const std::vector<int> p{0, 0, 0};
    const auto report = weighted_metrics(confusion(t, p, 2));
    CHECK(std::abs(report.accuracy - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(report.f1 - 8.0 / 15.0) < 1e-12);
    CHECK(std::abs(report.f1 - 0.5333333333333333) < 1e-12);
}

TEST_CASE("weighted recall is exactly accuracy on random confusions") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(5));
        ConfusionMatrix cm{k, std::vector<std::int64_t>(
                                  static_cast<std::size_t>(k) * static_cast<std::size_t>(k))};
        for (auto& c : cm.counts) c = static_cast<std::int64_t>(rng.next_below(20));
        if (cm.total() == 0) cm.counts[0] = 1;
        const auto report = weighted_metrics(cm);
        CHECK(report.recall == report.accuracy);  // exact, not approximate

        // sanity: agrees with the per-class weighted form
        double manual = 0.0;
        for (int c = 0; c < k; ++c) {
            std::int64_t support = 0;
            for (int j = 0; j < k; ++j) support += cm.at(c, j);
            if (support > 0)
                manual += (static_cast<double>(support) / static_cast<double>(cm.total())) *
                          (static_cast<double>(cm.at(c, c)) / static_cast<double>(support));
        }
        CHECK(report.recall == doctest::Approx(manual).epsilon(1e-12));
    }
}

TEST_CASE("metrics are invariant under consistent class relabeling") {
    Rng rng(13);
    const int k = 4;
    ConfusionMatrix cm{k, std::vector<std::int64_t>(16)};
    for (auto& c : cm.counts) c = static_cast<std::int64_t>(rng.next_below(30));
    const auto base = weighted_metrics(cm);

    // rotate labels by one
    ConfusionMatrix rotated{k, std::vector<std::int64_t>(16)};
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) rotated.at((i + 1) % k, (j + 1) % k) = cm.at(i, j);
    const auto perm = weighted_metrics(rotated);
    CHECK(perm.accuracy == doctest::Approx(base.accuracy).epsilon(1e-12));
    CHECK(perm.precision == doctest::Approx(base.precision).epsilon(1e-12));
    CHECK(perm.f1 == doctest::Approx(base.f1).epsilon(1e-12));
}

TEST_CASE("all-zero confusion is rejected") {
    ConfusionMatrix cm{2, std::vector<std::int64_t>(4, 0)};
    CHECK_THROWS_AS(weighted_metrics(cm), InvalidArgument);
}

TEST_CASE("evaluate is consistent with recomputing from its confusion") {
    Rng rng(3);
    Matrix x(60, 2);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < 60; ++i) {
        y[i] = static_cast<int>(i % 2);
        x(i, 0) = y[i] == 0 ? rng.next_gaussian() : 2.0 + rng.next_gaussian();
        x(i, 1) = rng.next_gaussian();
    }
    Dataset ds;
    ds.name = "eval";
    ds.x = x;
    ds.labels = y;
    ds.feature_names = {"a", "b"};
    ds.class_names = {"n", "p"};

    ForestParams params;
    params.n_estimators = 30;
    params.seed = 21;
    TrainedModel model(RandomForest::train(x, y, 2, params, 1));
    const auto report = evaluate(model, ds);
    CHECK(report.accuracy ==
          doctest::Approx(static_cast<double>(report.confusion.trace()) /
                          static_cast<double>(report.n_test))
              .epsilon(1e-15));
    CHECK(report.n_test == 60);

    SUBCASE("constant model on a single-class test set is perfect") {
        std::vector<std::size_t> zeros;
        for (std::size_t i = 0; i < 60; ++i)
            if (y[i] == 0) zeros.push_back(i);
        const Dataset only_zero = ds.select_rows(zeros);
        const std::vector<int> constant_y(only_zero.n_samples(), 0);
        TrainedModel constant(
            DecisionTree::train(only_zero.x, constant_y, 2, TreeParams{}, 0));
        CHECK(evaluate(constant, only_zero).accuracy == 1.0);
    }
}
