#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bolimes {

/// splitmix64 finalizer. The single mixing primitive behind every derived
/// seed in the project; portable and stable across platforms.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive the i-th numeric child stream of a seed.
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 1));
}

/// A master seed plus a human-readable stream label, e.g.
/// "boruta/iter=3" or "lime/instance=17". Every stochastic stage derives
/// its own stream so parallel execution order never changes results.
struct SeedContext {
    std::uint64_t master_seed = 42;
    std::string stream_label;
};

/// seed = mix64(master ^ mix64(fnv1a64(label))). Pure in (master, label);
/// distinct labels collide only with hash-collision probability.
std::uint64_t derive_seed(const SeedContext& ctx);
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label);

/// Deterministic 64-bit generator (splitmix64 sequence). Not cryptographic.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller; the second deviate of each pair is cached.
    double next_gaussian();

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Fisher-Yates permutation of a copy of `values`; the input is untouched.
std::vector<double> permute(std::span<const double> values, std::uint64_t seed);

/// In-place Fisher-Yates shuffle of an index vector.
void shuffle_indices(std::vector<std::size_t>& indices, std::uint64_t seed);

/// n gaussian deviates with the given mean and std. std == 0 yields n copies
/// of the mean; negative std is an error.
std::vector<double> sample_gaussian(std::size_t n, double mean, double std, std::uint64_t seed);

}  // namespace bolimes
