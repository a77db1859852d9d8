#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mcb/chain.hpp"
#include "mcb/expfamily.hpp"

namespace mcb {

// Relative entropy and Renyi divergence between two ergodic transition
// matrices with equal support, through the Perron eigenvalue of the
// entrywise power-combination matrix W^{1+s} V^{-s}.
class DivergencePair {
  public:
    DivergencePair(TransitionMatrix w, TransitionMatrix v);

    const TransitionMatrix& w() const { return w_; }
    const TransitionMatrix& v() const { return v_; }
    bool support_equal() const { return support_equal_; }

    // log Perron eigenvalue of W^{1+s} V^{-s}, cached per 1+s.
    double varphi(double one_plus_s) const;

    // D(W||V), computed two ways (derivative of varphi at 1, and the
    // stationary sum) and cross-checked; disagreement beyond 1e-6 is an
    // error, not silently resolved.
    double relative_entropy() const;

    // D_{1+s}(W||V) = varphi(1+s)/s for s != 0.
    double renyi(double s) const;

  private:
    TransitionMatrix w_, v_;
    Vec pi_w_;
    bool support_equal_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::uint64_t, double> varphi_cache_;
};

struct FamilyDivergences {
    double d;
    double renyi;
};

// Closed forms inside one exponential family:
// D(W_t||W_tb) = (t - tb) phi'(t) - phi(t) + phi(tb),
// D_{1+s}      = [phi((1+s)t - s tb) - (1+s) phi(t) + s phi(tb)] / s.
FamilyDivergences family_divergences(const TiltedFamily& fam, double theta, double theta_bar,
                                     double s);

struct LegendreResult {
    double value;
    double theta_star;
};

// sup_{theta>=0} [theta a - phi(theta)] for a above the mean (theta<=0
// branch below the mean), evaluated in closed form at theta* = eta^{-1}(a).
LegendreResult legendre(const TiltedFamily& fam, double a);

// Smaller solution of (theta-1) phi'(theta) - phi(theta) = r on [0,1];
// requires a hypothesis-testing family (phi(1) = 0) and r in [0, D(W0||W1)].
double theta_hat(const TiltedFamily& fam, double r);

struct HoeffdingResult {
    double value;  // D(W_{theta_hat(r)} || W_0)
    // [0] closed form, [1] sup (-theta r - phi)/(1-theta),
    // [2] sup theta(-r + D_{1-theta}(W0||W1))/(1-theta) via the pair route,
    // [3] inf over (s, theta) of D_{1+s}(W_theta||W0).
    std::array<double, 4> expressions;
};

HoeffdingResult hoeffding_exponent(const TiltedFamily& fam, double r);

struct MProjectionResult {
    double theta_star;
    double pythagorean_residual;
};

// Projects fam.base's family onto the mean-a set and verifies the
// Pythagorean identity against a test matrix built by tilting test_base
// (with the same generator) to mean a.
MProjectionResult m_projection(const TiltedFamily& fam, double a, const TransitionMatrix& test_base);

// X-marginal of a joint chain over an alphabet of size dim_x * dim_y with
// flat index (x, y) -> x * dim_y + y. Throws Error(HiddenChain) when the
// column sums over y vary with y' beyond 1e-10.
TransitionMatrix marginalize_non_hidden(const TransitionMatrix& w_joint, int dim_x, int dim_y);

struct IpiEntry {
    double s;
    double joint;
    double marginal;
    double margin;  // joint - marginal, nonnegative by the theorem
};

struct IpiReport {
    double d_joint;
    double d_marginal;
    double d_margin;
    std::vector<IpiEntry> renyi;
};

IpiReport ipi_check(const TransitionMatrix& w_joint, const TransitionMatrix& v_joint, int dim_x,
                    int dim_y, const std::vector<double>& s_list);

}  // namespace mcb
