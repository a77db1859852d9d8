#pragma once

#include <memory>
#include <optional>

#include "mcb/expfamily.hpp"
#include "mcb/oracle.hpp"
#include "mcb/tail_bounds.hpp"

namespace mcb {

// Two ergodic chains with equal support, wired into the exponential family
// with g = log(W1/W0) and h = log(P1/P0), so that W_{theta=0} = W0,
// W_{theta=1} = W1 and phi(0) = phi(1) = 0.
class HTFamily {
  public:
    HTFamily(TransitionMatrix w0, Vec p0, TransitionMatrix w1, Vec p1);

    const TransitionMatrix& w0() const { return w0_; }
    const TransitionMatrix& w1() const { return w1_; }
    const Vec& p0() const { return p0_; }
    const Vec& p1() const { return p1_; }
    const TiltedFamily& family() const { return *fam_; }

    double d01() const { return d01_; }  // D(W0||W1)
    double d10() const { return d10_; }  // D(W1||W0)

  private:
    TransitionMatrix w0_, w1_;
    Vec p0_, p1_;
    std::unique_ptr<TiltedFamily> fam_;
    double d01_ = 0.0, d10_ = 0.0;
};

struct HTBoundReport {
    long long n = 0;
    double r = 0.0;        // exponent constraint; epsilon = exp(-n r)
    double epsilon = 0.0;
    double lower_neg_log_beta = 0.0;
    double upper_neg_log_beta = 0.0;
    TailOptimizer optimizer;
    bool feasible = false;
    std::optional<double> exact_neg_log_beta;
};

// sup over theta in [0,1) of (n(-theta r - phi) - delta_lower) / (1-theta);
// lower-bounds -log beta_{e^{-nr}}.
double ht_lower(const HTFamily& ht, long long n, double r);

struct HTUpperResult {
    double value = 0.0;
    TailOptimizer optimizer;
    bool feasible = false;
};

// Numerical infimum of the testing theorem's closed-form expression over
// s > 0 and theta in (theta_hat(r), 1); upper-bounds -log beta_{e^{-nr}}.
HTUpperResult ht_upper(const HTFamily& ht, long long n, double r);

HTBoundReport ht_report(const HTFamily& ht, long long n, double r,
                        std::optional<double> exact_neg_log_beta = {});

// Two-term moderate-deviation expansion n D(W0||W1) - n^{1-t} sqrt(2 phi''(0) r).
double md_expansion(const HTFamily& ht, long long n, double t, double r);

struct InfoSpectrumBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool approximate = false;  // set when the Gaussian surrogate was used
};

// Information-spectrum sandwich for -log beta_epsilon from the P1-law of the
// log-likelihood ratio; exact by enumeration when the path space fits the
// budget, otherwise the clearly-labeled CLT surrogate with variance phi''(1).
InfoSpectrumBounds info_spectrum_bounds(const HTFamily& ht, long long n, double epsilon,
                                        double budget = 1e7);

// Second-order expansion n D(W1||W0) + sqrt(n phi''(1)) * Phi^{-1}(epsilon).
double stein_strassen(const HTFamily& ht, long long n, double epsilon);

struct ExactBeta {
    double beta = 0.0;
    double threshold = 0.0;      // log-likelihood-ratio value of the boundary atom
    double randomization = 0.0;  // acceptance weight of the boundary atom
};

// Exact optimal test by full enumeration: rank paths by likelihood ratio,
// spend P1-mass up to exactly epsilon (randomizing on the boundary atom
// unless randomized = false), and report the remaining P0-mass.
ExactBeta exact_beta(const HTFamily& ht, long long n, double epsilon, double budget = 1e7,
                     bool randomized = true);

}  // namespace mcb
