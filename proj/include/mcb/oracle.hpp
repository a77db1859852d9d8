#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mcb/expfamily.hpp"
#include "mcb/side.hpp"

namespace mcb {

struct PathAtom {
    double value;  // gtilde^n of the path, aggregated at 1e-12 granularity
    double p0;
    double p1;  // meaningful only when a second chain was supplied
};

struct PathDistribution {
    long long n = 0;
    bool has_second = false;
    std::vector<PathAtom> atoms;  // sorted ascending by value
    double total_w0 = 0.0;
};

struct SecondChain {
    TransitionMatrix w;
    Vec p;
};

// Brute-force law of gtilde^n under W^{x n} x P0; when a second chain is
// supplied every atom also carries that chain's path measure, so
// likelihood-ratio atoms are exact. Budget is checked before any work.
PathDistribution enumerate_paths(const TransitionMatrix& w, const Vec& p0, const GeneratorSpec& gen,
                                 long long n, const std::optional<SecondChain>& second = {},
                                 double budget = 1e7);

// P{gtilde^n >= n a} (or <=), boundary atoms fully included.
double exact_tail(const PathDistribution& dist, double a, TailSide side);

struct TailEstimate {
    double threshold;  // absolute threshold on gtilde^n, upper-tail count
    double frequency;
    double wilson_lo;
    double wilson_hi;
};

struct EmpiricalSummary {
    std::uint64_t seed = 0;
    long long count = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::vector<TailEstimate> tail_estimates;
    double ks_vs_gaussian = 0.0;
};

// Seeded Monte Carlo sampler of gtilde^n. One SplitMix64 generator per
// sample, derived from (seed, sample index); the draw order inside a sample
// is initial state, then the n transitions. KS is measured against the
// Gaussian with mean n eta(0) and variance n phi''(0).
EmpiricalSummary sample(const TransitionMatrix& w, const Vec& p0, const GeneratorSpec& gen,
                        long long n, long long count, std::uint64_t seed,
                        const std::vector<double>& thresholds = {});

// CSV with header "value,prob_w0[,prob_w1]".
void write_csv(const PathDistribution& dist, std::ostream& os);
PathDistribution read_csv(std::istream& is);

}  // namespace mcb
