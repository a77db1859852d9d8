#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcb/error.hpp"
#include "mcb/expfamily.hpp"
#include "test_support.hpp"

using namespace mcb;
using namespace mcb::test;

namespace {

const double kLn2 = std::log(2.0);

TiltedFamily family_a() { return make_family(chain_a(), indicator_generator()); }

}  // namespace

TEST_CASE("tilt: theta = 0 returns the base matrix") {
    const TransitionMatrix w = chain_a();
    const Matrix t = tilt(w, indicator_generator(), 0.0);
    CHECK(max_abs_diff(t, w.matrix()) == 0.0);
}

TEST_CASE("tilt: indicator generator doubles the x=1 row at theta = ln 2") {
    const Matrix t = tilt(chain_a(), indicator_generator(), kLn2);
    CHECK(t(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(t(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(t(1, 0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(t(1, 1) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("tilt: constant generator rescales uniformly; overflow guarded") {
    const TransitionMatrix w = chain_a();
    Matrix g(2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) g(r, c) = 3.0;
    const GeneratorSpec gen = GeneratorSpec::with_zero_h(g);
    const Matrix t = tilt(w, gen, 0.5);
    const double scale = std::exp(1.5);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) CHECK(t(r, c) == doctest::Approx(w(r, c) * scale).epsilon(1e-14));
    try {
        tilt(w, gen, 300.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overflow);
    }
}

TEST_CASE("check_nondegenerate: telescoping and constant generators") {
    const TransitionMatrix w = chain_a();
    Matrix g(2);
    for (int x = 0; x < 2; ++x)
        for (int xb = 0; xb < 2; ++xb) g(x, xb) = x - xb;
    NondegeneracyReport rep = check_nondegenerate(w, GeneratorSpec::with_zero_h(g));
    CHECK(rep.degenerate);
    CHECK(rep.f[1] - rep.f[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.c == doctest::Approx(0.0).epsilon(1e-9));

    Matrix g5(2);
    for (int x = 0; x < 2; ++x)
        for (int xb = 0; xb < 2; ++xb) g5(x, xb) = 5.0;
    rep = check_nondegenerate(w, GeneratorSpec::with_zero_h(g5));
    CHECK(rep.degenerate);
    CHECK(rep.c == doctest::Approx(5.0).epsilon(1e-9));

    rep = check_nondegenerate(w, indicator_generator());
    CHECK_FALSE(rep.degenerate);
}

TEST_CASE("family construction rejects degenerate generators unless allowed") {
    Matrix g(2);
    for (int x = 0; x < 2; ++x)
        for (int xb = 0; xb < 2; ++xb) g(x, xb) = 5.0;
    CHECK_THROWS_AS(make_family(chain_a(), GeneratorSpec::with_zero_h(g)), Error);
    CHECK_NOTHROW(
        TiltedFamily(chain_a(), GeneratorSpec::with_zero_h(g), stationary(chain_a()), true));
}

TEST_CASE("theta_point at zero: everything collapses") {
    const TiltedFamily fam = family_a();
    const ThetaPointPtr pt = fam.point(0.0);
    CHECK(pt->lambda == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::fabs(pt->phi) < 1e-12);
    CHECK(pt->perron.left_vec[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(pt->delta_upper) < 1e-12);
    CHECK(std::fabs(pt->delta_lower) < 1e-12);
    CHECK(max_abs_diff(pt->w_theta.matrix(), fam.base().matrix()) < 1e-12);
}

TEST_CASE("theta_point at ln 2 matches the closed-form eigenvalue") {
    const TiltedFamily fam = family_a();
    const ThetaPointPtr pt = fam.point(kLn2);
    CHECK(pt->lambda == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(pt->phi == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    // W_theta is a genuine transition matrix with the stated stationary law.
    const Vec pi = stationary(pt->w_theta);
    for (int i = 0; i < 2; ++i) CHECK(pi[i] == doctest::Approx(pt->pi_theta[i]).epsilon(1e-9));
    CHECK(pt->delta_lower <= pt->delta_upper);
}

TEST_CASE("one-state family is the scalar exponential") {
    Matrix w(1);
    w(0, 0) = 1.0;
    Matrix g(1);
    g(0, 0) = 0.7;
    const TiltedFamily fam(TransitionMatrix::validate(w), GeneratorSpec::with_zero_h(g), Vec{1.0},
                           true);
    const ThetaPointPtr pt = fam.point(2.0);
    CHECK(pt->lambda == doctest::Approx(std::exp(2.0 * 0.7)).epsilon(1e-14));
    CHECK(pt->phi == doctest::Approx(1.4).epsilon(1e-14));
}

TEST_CASE("eta at zero is the stationary mean") {
    const TiltedFamily fam = family_a();
    CHECK(fam.eta(0.0) == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
    CHECK(std::fabs(fam.eta_inverse(fam.eta(0.0))) < 1e-9);
}

TEST_CASE("eta is strictly increasing") {
    const TiltedFamily fam = family_a();
    double prev = fam.eta(-5.0);
    for (int i = 1; i <= 100; ++i) {
        const double theta = -5.0 + 10.0 * i / 100.0;
        const double e = fam.eta(theta);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("eta_inverse rejects unattainable targets") {
    const TiltedFamily fam = family_a();
    try {
        fam.eta_inverse(2.0);  // g takes values in {0,1}
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfRange);
    }
}

TEST_CASE("iid coin family: scalar closed forms") {
    const TiltedFamily fam = TiltedFamily::iid({0.5, 0.5}, {0.0, 1.0});
    CHECK(fam.phi(std::log(3.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    for (double theta : {-1.0, 0.3, 2.0})
        CHECK(fam.phi(theta) ==
              doctest::Approx(std::log((1.0 + std::exp(theta)) / 2.0)).epsilon(1e-12));
    CHECK(fam.fisher(0.0) == doctest::Approx(0.25).epsilon(1e-9));

    // Columns of W_theta all equal P_theta, and the corrections vanish.
    const ThetaPointPtr pt = fam.point(0.8);
    CHECK(pt->w_theta(0, 0) == doctest::Approx(pt->w_theta(0, 1)).epsilon(1e-12));
    CHECK(std::fabs(pt->delta_upper) < 1e-12);
    CHECK(std::fabs(pt->delta_lower) < 1e-12);
}

TEST_CASE("fisher is positive and matches the variance formula") {
    const TiltedFamily fam = family_a();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) CHECK(fam.fisher(u(rng)) > 0.0);

    const double formula = asymptotic_variance(chain_a(), indicator_generator());
    CHECK(std::fabs(formula - fam.fisher(0.0)) <= 1e-6 * std::fabs(formula));
}

TEST_CASE("asymptotic_variance reduces to V0[g] for iid chains") {
    Matrix w(2);
    w(0, 0) = 0.6;
    w(0, 1) = 0.6;
    w(1, 0) = 0.4;
    w(1, 1) = 0.4;
    const TransitionMatrix iid = TransitionMatrix::validate(w);
    Matrix g(2);
    g(1, 0) = 1.0;
    g(1, 1) = 1.0;
    const GeneratorSpec gen = GeneratorSpec::with_zero_h(g);
    // V0[1{x=1}] under pi = (0.6, 0.4): Bernoulli(0.4) variance.
    CHECK(asymptotic_variance(iid, gen) == doctest::Approx(0.24).epsilon(1e-10));
}

TEST_CASE("stationary_derivative: zero for constant g, matches finite differences") {
    const TransitionMatrix w = chain_a();
    Matrix gc(2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) gc(r, c) = 2.0;
    const Vec zero = stationary_derivative(w, GeneratorSpec::with_zero_h(gc));
    CHECK(std::fabs(zero[0]) < 1e-12);
    CHECK(std::fabs(zero[1]) < 1e-12);

    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 5; ++rep) {
        const TransitionMatrix wr = random_chain(rng, 3);
        const GeneratorSpec gen = random_nondegenerate_generator(rng, wr);
        const TiltedFamily fam = make_family(wr, gen);
        const Vec d = stationary_derivative(wr, gen);
        double dsum = 0.0;
        const double h = 1e-5;
        const ThetaPointPtr up = fam.point(h);
        const ThetaPointPtr dn = fam.point(-h);
        for (int i = 0; i < 3; ++i) {
            const double fd = (up->perron.right_vec[i] - dn->perron.right_vec[i]) / (2.0 * h);
            CHECK(d[i] == doctest::Approx(fd).epsilon(1e-4).scale(1.0));
            CHECK(std::fabs(d[i] - fd) < 1e-6);
            dsum += d[i];
        }
        CHECK(std::fabs(dsum) < 1e-10);
    }
}

TEST_CASE("cgf_exact: zero at theta = 0 and the four-path fixture") {
    const TiltedFamily fam = family_a();
    for (long long n : {1, 5, 20}) CHECK(std::fabs(fam.cgf_exact(n, 0.0)) < 1e-12);
    CHECK(fam.cgf_exact(1, kLn2) == doctest::Approx(std::log(10.0 / 7.0)).epsilon(1e-14));
}

TEST_CASE("cgf_exact matches brute-force path sums") {
    const TiltedFamily fam = family_a();
    const TransitionMatrix w = chain_a();
    const GeneratorSpec gen = indicator_generator();
    const Vec p0 = stationary(w);
    const double theta = 0.37;
    const long long n = 3;
    double acc = 0.0;
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
            for (int x3 = 0; x3 < 2; ++x3)
                for (int x4 = 0; x4 < 2; ++x4) {
                    const double p = p0[x1] * w(x2, x1) * w(x3, x2) * w(x4, x3);
                    const double val = gen.g(x2, x1) + gen.g(x3, x2) + gen.g(x4, x3);
                    acc += p * std::exp(theta * val);
                }
    CHECK(fam.cgf_exact(n, theta) == doctest::Approx(std::log(acc)).epsilon(1e-12));
}

TEST_CASE("cgf sandwich on the fixture family") {
    const TiltedFamily fam = family_a();
    for (long long n = 1; n <= 20; ++n)
        for (double theta : {-1.0, -0.5, 0.5, 1.0, kLn2}) {
            const double exact = fam.cgf_exact(n, theta);
            const TiltedFamily::CgfBounds b = fam.cgf_bounds(n, theta);
            CHECK(b.lower <= exact + 1e-10);
            CHECK(exact <= b.upper + 1e-10);
            CHECK(b.upper - b.lower ==
                  doctest::Approx(fam.point(theta)->delta_upper - fam.point(theta)->delta_lower));
        }
    const TiltedFamily::CgfBounds zero = fam.cgf_bounds(7, 0.0);
    CHECK(std::fabs(zero.lower) < 1e-12);
    CHECK(std::fabs(zero.upper) < 1e-12);
}

TEST_CASE("phi_n / n converges to phi") {
    const TiltedFamily fam = family_a();
    const long long n = 1000;
    for (double theta : {-1.0, 0.5, 1.0}) {
        const ThetaPointPtr pt = fam.point(theta);
        const double gap = std::max(std::fabs(pt->delta_upper), std::fabs(pt->delta_lower));
        CHECK(std::fabs(fam.cgf_exact(n, theta) / n - pt->phi) <= gap / n + 1e-12);
    }
}

TEST_CASE("phi is convex") {
    std::mt19937_64 rng(31);
    const TiltedFamily fam = family_a();
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> tt(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        double t1 = u(rng), t2 = u(rng);
        if (t1 > t2) std::swap(t1, t2);
        const double t = tt(rng);
        const double mid = t * t1 + (1.0 - t) * t2;
        CHECK(fam.phi(mid) <= t * fam.phi(t1) + (1.0 - t) * fam.phi(t2) + 1e-10);
    }
}

TEST_CASE("corrections vanish as theta goes to zero") {
    // A family whose corrections are nonzero: off-stationary start.
    const TiltedFamily fam(chain_a(), indicator_generator(), Vec{0.9, 0.1});
    double prev_bound = 1e9;
    for (double theta : {0.64, 0.32, 0.16, 0.08, 0.04, 0.02, 0.01}) {
        const ThetaPointPtr pt = fam.point(theta);
        const double mag =
            std::max(std::fabs(pt->delta_upper), std::fabs(pt->delta_lower));
        CHECK(mag <= prev_bound + 1e-12);
        prev_bound = mag;
    }
    CHECK(prev_bound < 5e-3);
}

TEST_CASE("eta agrees with the finite difference of phi") {
    const TiltedFamily fam = family_a();
    const double h = 1e-6;
    for (int i = 0; i <= 20; ++i) {
        const double theta = -2.0 + 4.0 * i / 20.0;
        const double fd = (fam.phi(theta + h) - fam.phi(theta - h)) / (2.0 * h);
        CHECK(std::fabs(fam.eta(theta) - fd) < 1e-7);
    }
}

TEST_CASE("CLT scaling of the cumulant generating function") {
    const TiltedFamily fam = family_a();
    const long long n = 10000;
    const double eta0 = fam.eta(0.0);
    const double fisher0 = fam.fisher(0.0);
    for (double delta : {0.5, 1.0, 2.0}) {
        const double theta = delta / std::sqrt(static_cast<double>(n));
        const double lhs = fam.cgf_exact(n, theta) - delta * std::sqrt(static_cast<double>(n)) * eta0;
        CHECK(std::fabs(lhs - delta * delta * fisher0 / 2.0) < 5e-3);
    }
}

TEST_CASE("divergence-rate limit through the cgf sandwich") {
    // g = log(W1/W0), h = log(P1/P0): phi_n(-s)/s is the n-fold Renyi divergence.
    const TransitionMatrix w0 = chain_a();
    const TransitionMatrix w1 = chain_b();
    Matrix g(2);
    for (int x = 0; x < 2; ++x)
        for (int xb = 0; xb < 2; ++xb) g(x, xb) = std::log(w1(x, xb) / w0(x, xb));
    GeneratorSpec gen;
    gen.g = g;
    gen.h = Vec{std::log(0.5 / (4.0 / 7.0)), std::log(0.5 / (3.0 / 7.0))};
    const TiltedFamily fam(w0, gen, stationary(w0));
    const long long n = 500;
    for (double s : {0.5, 1.0}) {
        const ThetaPointPtr pt = fam.point(-s);
        const double gap = std::max(std::fabs(pt->delta_upper), std::fabs(pt->delta_lower));
        const double rate_n = fam.cgf_exact(n, -s) / (s * n);  // (1/n) D_{1+s} of the n-fold laws
        const double rate_inf = pt->phi / s;                   // D_{1+s}(W0||W1)
        CHECK(std::fabs(rate_n - rate_inf) <= gap / (s * n) + 1e-12);
    }
}

TEST_CASE("theta cache returns identical objects") {
    const TiltedFamily fam = family_a();
    const ThetaPointPtr a = fam.point(0.25);
    const ThetaPointPtr b = fam.point(0.25);
    CHECK(a.get() == b.get());
}
