#pragma once

// Portable random primitives.  The standard distributions are
// implementation-defined, so byte-reproducible output needs its own.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace adelic {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream i derived from a master seed: splitmix64(master ^ golden * (i + 1)).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

/// Uniform integer in [0, n), n >= 1, by rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if ((n & (n - 1)) == 0) return rng() & (n - 1);
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform double in (0, 1).
inline double uniform_open01(Rng& rng) {
    double u;
    do {
        u = uniform01(rng);
    } while (u == 0.0);
    return u;
}

/// Standard normal via Box-Muller (one variate per call).
inline double standard_normal(Rng& rng) {
    const double u1 = uniform_open01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace adelic
