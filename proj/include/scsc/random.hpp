#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <utility>

namespace scsc {

/// Deterministic generator (splitmix64) with explicit float derivation so
/// that a given seed produces the identical stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 bits of mantissa.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Uniform index in [0, n); n must be positive.
    std::size_t index(std::size_t n) { return std::size_t(next_u64() % n); }

private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle driven by Rng (std::shuffle is not stable across
/// standard library implementations).
template <class It>
void shuffle(It first, It last, Rng& rng) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(first[i - 1], first[rng.index(i)]);
    }
}

} // namespace scsc
