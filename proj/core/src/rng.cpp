#include "bolimes/rng.hpp"

#include <cmath>
#include <numbers>

#include "bolimes/errors.hpp"

namespace bolimes {

namespace {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label) {
    return mix64(master_seed ^ mix64(fnv1a64(stream_label)));
}

std::uint64_t derive_seed(const SeedContext& ctx) {
    return derive_seed(ctx.master_seed, ctx.stream_label);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<double> permute(std::span<const double> values, std::uint64_t seed) {
    std::vector<double> out(values.begin(), values.end());
    Rng rng(seed);
    for (std::size_t i = out.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

void shuffle_indices(std::vector<std::size_t>& indices, std::uint64_t seed) {
    Rng rng(seed);
    for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(indices[i - 1], indices[j]);
    }
}

std::vector<double> sample_gaussian(std::size_t n, double mean, double std, std::uint64_t seed) {
    if (std < 0.0) throw InvalidArgument("sample_gaussian: std must be non-negative");
    std::vector<double> out(n, mean);
    if (std == 0.0) return out;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) out[i] = mean + std * rng.next_gaussian();
    return out;
}

}  // namespace bolimes
