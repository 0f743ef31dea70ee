#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic sampling helpers. The standard <random> distributions are
// implementation-defined, so every draw in the project goes through these:
// results are then reproducible for a fixed seed on any platform/compiler.

namespace aggstream::rng {

/// splitmix64 finalizer; used to derive independent seeds from a base seed.
inline uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) { return mix(mix(a) ^ b); }
inline uint64_t mix(uint64_t a, uint64_t b, uint64_t c) { return mix(mix(a, b) ^ c); }

/// Seed for the model replica handed to one partition's worker. Shared by the
/// engine and the sequential reference path so both derive identical streams.
inline uint64_t replica_salt(uint64_t run_seed, uint64_t batch_seq, uint32_t partition) {
    return mix(run_seed, batch_seq, 0x7265706cULL + partition);
}

/// Uniform double in [0, 1) with 53 significant bits.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be > 0.
inline uint64_t below(std::mt19937_64& g, uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = g();
    } while (x >= limit);
    return x % n;
}

/// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
inline double gaussian(std::mt19937_64& g) {
    double u1 = uniform01(g);
    double u2 = uniform01(g);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline double gaussian(std::mt19937_64& g, double mean, double stddev) {
    return mean + stddev * gaussian(g);
}

/// Poisson draw (Knuth). Fine for the small lambdas used here; lambda <= 0
/// yields 0 draws, which gives a convenient "always skip" setting.
inline int poisson(std::mt19937_64& g, double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    double p = 1.0;
    int k = 0;
    do {
        ++k;
        p *= uniform01(g);
    } while (p > limit);
    return k - 1;
}

/// Fisher-Yates shuffle driven by below(); deterministic for a fixed seed.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& g) {
    for (size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[static_cast<size_t>(below(g, i))]);
    }
}

} // namespace aggstream::rng
