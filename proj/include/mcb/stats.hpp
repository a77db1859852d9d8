#pragma once

#include <cstdint>

namespace mcb {

double normal_cdf(double x);

// Standard normal quantile (Wichura's AS241 rational approximation,
// absolute error well below 1e-9). p must lie in (0, 1).
double normal_quantile(double p);

struct WilsonInterval {
    double lo;
    double hi;
};

// 95% Wilson score interval for k successes out of n trials.
WilsonInterval wilson95(long long k, long long n);

// Counter-friendly 64-bit generator (SplitMix64). The Monte Carlo sampler
// derives one generator per sample index from (seed, index), so output is
// independent of any sharding. The algorithm is pinned: changing it changes
// every seeded result.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace mcb
