#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mcb/chain.hpp"
#include "mcb/linalg.hpp"

namespace mcb {

// Two-input generator g(x, xbar) plus initial weight h(x). Values of g on
// off-support pairs of the attached chain are ignored everywhere.
struct GeneratorSpec {
    Matrix g;
    Vec h;
    std::string label;

    static GeneratorSpec with_zero_h(Matrix g, std::string label = {}) {
        GeneratorSpec out;
        out.h = Vec(static_cast<std::size_t>(g.dim()), 0.0);
        out.g = std::move(g);
        out.label = std::move(label);
        return out;
    }
};

struct NondegeneracyReport {
    bool degenerate = false;
    Vec f;  // witness with f[0] = 0, meaningful when degenerate
    double c = 0.0;
    double residual = 0.0;
};

// Least-squares solve of g(x,xbar) = f(x) - f(xbar) + c over support edges;
// degenerate iff the residual sup-norm is <= 1e-9.
NondegeneracyReport check_nondegenerate(const TransitionMatrix& w, const GeneratorSpec& gen);

// Entrywise W(x|xbar) * exp(theta * g(x,xbar)); zeros stay zero.
// Throws Error(Overflow) when |theta * g| > 700 on the support.
Matrix tilt(const TransitionMatrix& w, const GeneratorSpec& gen, double theta);

// Everything the library needs at one value of the natural parameter.
struct ThetaPoint {
    double theta = 0.0;
    double lambda = 0.0;        // Perron eigenvalue of the tilted matrix
    double phi = 0.0;           // log(lambda)
    PerronData perron;          // right_vec = sum-1 right eigenvector, left_vec = v with min 1
    TransitionMatrix w_theta;   // normalized tilted transition matrix
    Vec pi_theta;               // stationary distribution of w_theta
    double eta = 0.0;           // stationary mean of g under w_theta
    double delta_upper = 0.0;   // log <v_theta, w_theta_vec>
    double delta_lower = 0.0;   // delta_upper - log max v_theta
};

using ThetaPointPtr = std::shared_ptr<const ThetaPoint>;

// One-parameter exponential family of transition matrices over an ergodic
// base chain. Immutable once built; the per-theta cache is a thread-safe
// memo table (results are deterministic, so duplicate computation and
// last-write-wins are both fine).
class TiltedFamily {
  public:
    static constexpr double kThetaMax = 50.0;

    TiltedFamily(TransitionMatrix base, GeneratorSpec gen, Vec initial,
                 bool allow_degenerate = false);

    // Base chain with every column equal to p and g(x, xbar) = g_single[x];
    // reproduces the distribution-level exponential family.
    static TiltedFamily iid(const Vec& p, const Vec& g_single);

    const TransitionMatrix& base() const { return base_; }
    const GeneratorSpec& gen() const { return gen_; }
    const Vec& initial() const { return initial_; }
    bool degenerate() const { return nondeg_.degenerate; }
    const NondegeneracyReport& nondegeneracy() const { return nondeg_; }

    ThetaPointPtr point(double theta) const;

    double phi(double theta) const { return point(theta)->phi; }
    double eta(double theta) const { return point(theta)->eta; }

    // Bisection on the strictly increasing eta over [-theta_max, theta_max]
    // (clamped to the overflow-safe range); |eta(theta) - a| <= 1e-10.
    double eta_inverse(double a, double theta_max = kThetaMax) const;

    // Richardson-extrapolated central difference of the analytic eta.
    double fisher(double theta) const;

    // phi_n(theta) = log <1, Wtilde_theta^n w_theta>, with per-step rescaling.
    double cgf_exact(long long n, double theta) const;

    struct CgfBounds {
        double lower;
        double upper;
    };
    CgfBounds cgf_bounds(long long n, double theta) const;

    // Largest |theta| for which the tilted matrix stays inside the exp range.
    double overflow_safe_theta() const { return theta_limit_; }

  private:
    TransitionMatrix base_;
    GeneratorSpec gen_;
    Vec initial_;
    NondegeneracyReport nondeg_;
    double theta_limit_ = kThetaMax;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::uint64_t, ThetaPointPtr> cache_;
};

// Eq.-style closed form for the second derivative of phi at 0:
// V0[g] + 2 gcond^T (Z - A) gjoint, where gcond(xbar) = sum_x W(x|xbar) g(x,xbar)
// and gjoint(x) = sum_xbar W(x|xbar) pi(xbar) g(x,xbar).
double asymptotic_variance(const TransitionMatrix& w, const GeneratorSpec& gen);

// Derivative of the sum-normalized right Perron vector at theta = 0:
// (Z - A) gjoint. Entries sum to zero.
Vec stationary_derivative(const TransitionMatrix& w, const GeneratorSpec& gen);

}  // namespace mcb
