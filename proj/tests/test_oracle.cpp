#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/oracle.hpp"
#include "mcb/tail_bounds.hpp"
#include "test_support.hpp"

using namespace mcb;
using namespace mcb::test;

TEST_CASE("enumerate: four-path fixture at n = 1") {
    const TransitionMatrix w = chain_a();
    const Vec pi = stationary(w);
    const PathDistribution dist = enumerate_paths(w, pi, indicator_generator(), 1);
    REQUIRE(dist.atoms.size() == 2);
    // P{g = 0} = P{X2 = 0} = (4/7) 0.7 + (3/7) 0.4 = 4/7 under stationarity.
    CHECK(dist.atoms[0].value == doctest::Approx(0.0));
    CHECK(dist.atoms[0].p0 == doctest::Approx(4.0 / 7.0).epsilon(1e-13));
    CHECK(dist.atoms[1].value == doctest::Approx(1.0));
    CHECK(dist.atoms[1].p0 == doctest::Approx(3.0 / 7.0).epsilon(1e-13));
    CHECK(dist.total_w0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate: zero generator collapses to the h atoms") {
    const TransitionMatrix w = chain_a();
    GeneratorSpec gen = GeneratorSpec::with_zero_h(Matrix(2));
    const PathDistribution dist = enumerate_paths(w, stationary(w), gen, 6);
    REQUIRE(dist.atoms.size() == 1);
    CHECK(dist.atoms[0].value == 0.0);
    CHECK(dist.atoms[0].p0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate: budget is checked before any work") {
    try {
        enumerate_paths(chain_a(), stationary(chain_a()), indicator_generator(), 60);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
}

TEST_CASE("enumerate/cgf identity on random instances") {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> dims(2, 3);
    std::uniform_real_distribution<double> thetas(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const int dim = dims(rng);
        const TransitionMatrix w = random_chain(rng, dim);
        const GeneratorSpec gen = random_nondegenerate_generator(rng, w);
        const TiltedFamily fam = make_family(w, gen);
        const long long n = 4 + rep % 4;
        const PathDistribution dist = enumerate_paths(w, fam.initial(), gen, n);
        const double theta = thetas(rng);
        double acc = 0.0;
        for (const PathAtom& a : dist.atoms) acc += a.p0 * std::exp(theta * a.value);
        CHECK(std::fabs(std::log(acc) - fam.cgf_exact(n, theta)) < 1e-10);
    }
}

TEST_CASE("exact_tail: extremes and monotonicity") {
    const TransitionMatrix w = chain_a();
    const PathDistribution dist = enumerate_paths(w, stationary(w), indicator_generator(), 10);
    CHECK(exact_tail(dist, -0.5, TailSide::UpperTail) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact_tail(dist, 1.5, TailSide::UpperTail) == 0.0);
    double prev = 1.0;
    for (int i = 0; i <= 30; ++i) {
        const double a = -0.1 + 1.2 * i / 30.0;
        const double t = exact_tail(dist, a, TailSide::UpperTail);
        CHECK(t <= prev + 1e-15);
        prev = t;
    }
    // Upper and lower tails overlap exactly on boundary atoms.
    const double at_half = exact_tail(dist, 0.55, TailSide::UpperTail) +
                           exact_tail(dist, 0.55, TailSide::LowerTail);
    CHECK(at_half == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample: determinism under a fixed seed") {
    const TransitionMatrix w = chain_a();
    const GeneratorSpec gen = indicator_generator();
    const Vec pi = stationary(w);
    const EmpiricalSummary s1 = sample(w, pi, gen, 50, 2000, 42, {20.0, 25.0});
    const EmpiricalSummary s2 = sample(w, pi, gen, 50, 2000, 42, {20.0, 25.0});
    CHECK(s1.mean == s2.mean);
    CHECK(s1.variance == s2.variance);
    CHECK(s1.ks_vs_gaussian == s2.ks_vs_gaussian);
    REQUIRE(s1.tail_estimates.size() == 2);
    CHECK(s1.tail_estimates[0].frequency == s2.tail_estimates[0].frequency);
    const EmpiricalSummary s3 = sample(w, pi, gen, 50, 2000, 43, {});
    CHECK(s1.mean != s3.mean);
}

TEST_CASE("sample: variance scaling and KS against the Gaussian limit") {
    const TransitionMatrix w = chain_a();
    const GeneratorSpec gen = indicator_generator();
    const long long n = 2000, count = 20000;
    const EmpiricalSummary s = sample(w, stationary(w), gen, n, count, 7, {});
    const double fisher0 = asymptotic_variance(w, gen);
    CHECK(s.variance / static_cast<double>(n) == doctest::Approx(fisher0).epsilon(0.08));
    CHECK(s.ks_vs_gaussian < 0.05);
    CHECK(s.mean / static_cast<double>(n) == doctest::Approx(3.0 / 7.0).epsilon(0.05));
}

TEST_CASE("sample: Wilson intervals contain the frequency") {
    const TransitionMatrix w = chain_a();
    const EmpiricalSummary s =
        sample(w, stationary(w), indicator_generator(), 40, 5000, 11, {15.0, 18.0, 21.0});
    for (const TailEstimate& t : s.tail_estimates) {
        CHECK(t.wilson_lo <= t.frequency + 1e-12);
        CHECK(t.frequency <= t.wilson_hi + 1e-12);
        CHECK(t.wilson_lo >= 0.0);
        CHECK(t.wilson_hi <= 1.0);
    }
}

TEST_CASE("monte carlo tails fall inside the analytic sandwich") {
    const TransitionMatrix w = chain_a();
    const GeneratorSpec gen = indicator_generator();
    const TiltedFamily fam = make_family(w, gen);
    const long long n = 60, count = 200000;
    const std::vector<double> a_grid{0.55, 0.6, 0.65, 0.7};
    std::vector<double> thresholds;
    for (double a : a_grid) thresholds.push_back(a * static_cast<double>(n));
    const EmpiricalSummary s = sample(w, fam.initial(), gen, n, count, 1234, thresholds);
    int inside = 0;
    for (std::size_t i = 0; i < a_grid.size(); ++i) {
        const double lo_neg_log = tail_lower(fam, n, a_grid[i], TailSide::UpperTail);
        const TailUpperResult up = tail_upper(fam, n, a_grid[i], TailSide::UpperTail);
        const double p_hi = std::exp(-lo_neg_log);
        const double p_lo = up.feasible ? std::exp(-up.value) : 0.0;
        const TailEstimate& t = s.tail_estimates[i];
        if (t.wilson_lo <= p_hi && p_lo <= t.wilson_hi) ++inside;
    }
    CHECK(inside == static_cast<int>(a_grid.size()));
}

TEST_CASE("csv round trip") {
    const TransitionMatrix w = chain_a();
    const PathDistribution dist = enumerate_paths(
        w, stationary(w), indicator_generator(), 6, SecondChain{chain_b(), stationary(chain_b())});
    std::stringstream ss;
    write_csv(dist, ss);
    const PathDistribution back = read_csv(ss);
    REQUIRE(back.atoms.size() == dist.atoms.size());
    CHECK(back.has_second);
    for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
        CHECK(back.atoms[i].value == dist.atoms[i].value);
        CHECK(back.atoms[i].p0 == dist.atoms[i].p0);
        CHECK(back.atoms[i].p1 == dist.atoms[i].p1);
    }
}
