#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bolimes/dataset.hpp"
#include "bolimes/errors.hpp"
#include "bolimes/forest.hpp"
#include "bolimes/model.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

namespace {

struct Toy {
    Matrix x;
    std::vector<int> y;
};

// Only feature 0 carries signal; the rest are standard gaussian noise.
Toy single_signal(std::size_t n, std::size_t p, std::uint64_t seed, double separation = 3.0) {
    Rng rng(seed);
    Toy toy;
    toy.x = Matrix(n, p);
    toy.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        toy.y[i] = static_cast<int>(i % 2);
        toy.x(i, 0) = toy.y[i] == 0 ? rng.next_gaussian() : separation + rng.next_gaussian();
        for (std::size_t j = 1; j < p; ++j) toy.x(i, j) = rng.next_gaussian();
    }
    return toy;
}

}  // namespace

TEST_CASE("a forest of one unbootstrapped tree equals that tree") {
    const Toy toy = single_signal(50, 4, 8);
    ForestParams params;
    params.n_estimators = 1;
    params.bootstrap = false;
    params.tree = TreeParams{6, 1, FeatureSubset::all()};
    params.seed = 31;
    const RandomForest forest = RandomForest::train(toy.x, toy.y, 2, params, 1);
    const DecisionTree tree =
        DecisionTree::train(toy.x, toy.y, 2, params.tree, child_seed(child_seed(params.seed, 0), 1));
    for (std::size_t i = 0; i < toy.x.rows(); ++i)
        CHECK(forest.predict_row(toy.x.row(i)) == tree.predict_row(toy.x.row(i)));
}

TEST_CASE("same seed twice gives identical predictions on a probe set") {
    const Toy toy = single_signal(80, 6, 12);
    ForestParams params;
    params.n_estimators = 40;
    params.seed = 7;
    const RandomForest a = RandomForest::train(toy.x, toy.y, 2, params, 2);
    const RandomForest b = RandomForest::train(toy.x, toy.y, 2, params, 1);
    Rng rng(5);
    for (int probe = 0; probe < 50; ++probe) {
        std::vector<double> row(6);
        for (auto& v : row) v = rng.next_gaussian();
        CHECK(a.predict_row(row) == b.predict_row(row));
        std::vector<double> pa(2), pb(2);
        a.predict_proba_row(row, pa);
        b.predict_proba_row(row, pb);
        CHECK(pa == pb);
    }
}

TEST_CASE("probabilities are the tree vote fractions") {
    const Toy toy = single_signal(60, 5, 3);
    ForestParams params;
    params.n_estimators = 25;
    params.seed = 9;
    const RandomForest forest = RandomForest::train(toy.x, toy.y, 2, params, 2);
    Rng rng(11);
    for (int probe = 0; probe < 30; ++probe) {
        std::vector<double> row(5);
        for (auto& v : row) v = rng.next_gaussian();
        std::vector<int> votes(2, 0);
        for (const auto& tree : forest.trees()) ++votes[tree.predict_row(row)];
        std::vector<double> proba(2);
        forest.predict_proba_row(row, proba);
        CHECK(proba[0] == doctest::Approx(votes[0] / 25.0).epsilon(1e-12));
        CHECK(proba[1] == doctest::Approx(votes[1] / 25.0).epsilon(1e-12));
        CHECK(proba[0] + proba[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("planted single-signal data concentrates importance on feature 0") {
    const Toy toy = single_signal(200, 10, 17, 4.0);
    ForestParams params;
    params.n_estimators = 100;
    params.seed = 1;
    params.tree = TreeParams{4, 1, FeatureSubset::all()};
    const RandomForest forest = RandomForest::train(toy.x, toy.y, 2, params, 2);
    const auto scores = forest.feature_importances();
    CHECK(scores.values[0] > 0.8);
    const double rest =
        std::accumulate(scores.values.begin() + 1, scores.values.end(), 0.0);
    CHECK(rest < 0.1);
}

TEST_CASE("stumps that never split produce all-zero importances") {
    const Toy toy = single_signal(40, 3, 2);
    ForestParams params;
    params.n_estimators = 10;
    params.tree = TreeParams{4, 40, FeatureSubset::all()};  // min leaf = n blocks any split
    params.seed = 3;
    const RandomForest forest = RandomForest::train(toy.x, toy.y, 2, params, 1);
    const auto scores = forest.feature_importances();
    for (double v : scores.values) CHECK(v == 0.0);
    for (double z : forest.importance_zscores()) CHECK(z == 0.0);
}

TEST_CASE("importances normalize to one on random data whenever any split fires") {
    Rng rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const Toy toy = single_signal(50 + rng.next_below(50), 4 + rng.next_below(5),
                                      rng.next_u64());
        ForestParams params;
        params.n_estimators = 20;
        params.seed = rng.next_u64();
        const RandomForest forest =
            RandomForest::train(toy.x, toy.y, 2, params, 2);
        const auto scores = forest.feature_importances();
        const double total = std::accumulate(scores.values.begin(), scores.values.end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-9);
        for (double v : scores.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("model wrapper dispatches and validates feature counts") {
    const Toy toy = single_signal(50, 4, 77);
    ForestParams params;
    params.n_estimators = 15;
    params.seed = 5;
    TrainedModel model(RandomForest::train(toy.x, toy.y, 2, params, 1));
    CHECK(model.kind() == ModelKind::Forest);
    CHECK(model.n_classes() == 2);
    CHECK(model.n_features() == 4);

    const auto labels = predict(model, toy.x);
    const Matrix proba = predict_proba(model, toy.x);
    for (std::size_t i = 0; i < toy.x.rows(); ++i) {
        double sum = 0.0;
        int argmax = 0;
        for (std::size_t c = 0; c < 2; ++c) {
            sum += proba(i, c);
            if (proba(i, c) > proba(i, static_cast<std::size_t>(argmax)))
                argmax = static_cast<int>(c);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(labels[i] == argmax);
    }

    Matrix wrong(3, 7);
    CHECK_THROWS_AS(predict(model, wrong), InvalidArgument);
}
