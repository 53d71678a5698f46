#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "bolimes/errors.hpp"
#include "bolimes/rng.hpp"

using namespace bolimes;

TEST_CASE("derive_seed is deterministic and label/master sensitive") {
    CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
    CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
    CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
    CHECK(derive_seed(SeedContext{42, "boruta/iter=3"}) == derive_seed(42, "boruta/iter=3"));
}

TEST_CASE("distinct labels yield distinct seeds over many streams") {
    std::map<std::uint64_t, int> seen;
    for (int i = 0; i < 10000; ++i) ++seen[derive_seed(42, "stream=" + std::to_string(i))];
    CHECK(seen.size() == 10000);
}

TEST_CASE("permute returns a multiset-identical copy and leaves input untouched") {
    const std::vector<double> input{3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    const auto snapshot = input;
    auto out = permute(input, 7);
    CHECK(input == snapshot);
    auto sorted_in = input;
    auto sorted_out = out;
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(sorted_out.begin(), sorted_out.end());
    CHECK(sorted_in == sorted_out);
}

TEST_CASE("permute of a single element is the identity") {
    CHECK(permute(std::vector<double>{42.0}, 1) == std::vector<double>{42.0});
}

TEST_CASE("permute preserves the multiset over random inputs") {
    Rng rng(400);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.next_below(50);
        std::vector<double> values(n);
        for (auto& v : values) v = static_cast<double>(rng.next_below(8));  // duplicates likely
        auto out = permute(values, rng.next_u64());
        std::sort(values.begin(), values.end());
        std::sort(out.begin(), out.end());
        CHECK(values == out);
    }
}

TEST_CASE("permute is uniform over the six orders of three elements") {
    const std::vector<double> base{1.0, 2.0, 3.0};
    std::map<std::vector<double>, int> counts;
    const int n = 10000;
    for (int seed = 0; seed < n; ++seed) ++counts[permute(base, static_cast<std::uint64_t>(seed))];
    CHECK(counts.size() == 6);
    for (const auto& [order, count] : counts) {
        const double freq = static_cast<double>(count) / n;
        CHECK(freq == doctest::Approx(1.0 / 6.0).epsilon(0.12));  // 1/6 +- 0.02
        CHECK(std::abs(freq - 1.0 / 6.0) < 0.02);
    }
}

TEST_CASE("sample_gaussian degenerate and moment checks") {
    SUBCASE("zero std returns copies of the mean") {
        const auto v = sample_gaussian(5, 2.0, 0.0, 9);
        CHECK(v == std::vector<double>(5, 2.0));
    }
    SUBCASE("negative std is rejected") {
        CHECK_THROWS_AS(sample_gaussian(3, 0.0, -1.0, 9), InvalidArgument);
    }
    SUBCASE("large-sample moments match") {
        const auto v = sample_gaussian(100000, 0.0, 1.0, 123);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        CHECK(std::abs(mean) < 0.02);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 0.02);
    }
    SUBCASE("same seed twice gives identical vectors") {
        CHECK(sample_gaussian(100, 1.0, 2.0, 5) == sample_gaussian(100, 1.0, 2.0, 5));
    }
}

TEST_CASE("next_below covers the range without bias at small bounds") {
    Rng rng(11);
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 30000; ++i) ++counts[rng.next_below(3)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}
