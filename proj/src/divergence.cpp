#include "mcb/divergence.hpp"

#include <bit>
#include <cmath>

#include "mcb/error.hpp"
#include "mcb/optimize.hpp"

namespace mcb {

DivergencePair::DivergencePair(TransitionMatrix w, TransitionMatrix v)
    : w_(std::move(w)), v_(std::move(v)) {
    support_equal_ = w_.same_support(v_);
    if (support_equal_) {
        const Classification cw = classify(w_);
        const Classification cv = classify(v_);
        if (!cw.ergodic || !cv.ergodic)
            throw Error(ErrorCode::NotErgodic, "divergences need ergodic chains");
        pi_w_ = stationary(w_);
    }
}

double DivergencePair::varphi(double one_plus_s) const {
    if (!support_equal_) throw Error(ErrorCode::SupportMismatch, "supports differ");
    const std::uint64_t key = std::bit_cast<std::uint64_t>(one_plus_s);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = varphi_cache_.find(key);
        if (it != varphi_cache_.end()) return it->second;
    }
    const int n = w_.dim();
    const double s = one_plus_s - 1.0;
    Matrix m(n);
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb) {
            if (!w_.support(x, xb)) continue;
            const double e = one_plus_s * std::log(w_(x, xb)) - s * std::log(v_(x, xb));
            if (std::fabs(e) > 700.0)
                throw Error(ErrorCode::Overflow, "power combination exceeds the exp range");
            m(x, xb) = std::exp(e);
        }
    const double value = std::log(perron(m).eigenvalue);
    std::lock_guard<std::mutex> lock(cache_mutex_);
    varphi_cache_.emplace(key, value);
    return value;
}

double DivergencePair::relative_entropy() const {
    if (!support_equal_) throw Error(ErrorCode::SupportMismatch, "supports differ");
    // Route one: Richardson-extrapolated central difference of varphi at 1.
    const double h = 1e-6;
    const double d1 = (varphi(1.0 + h) - varphi(1.0 - h)) / (2.0 * h);
    const double d2 = (varphi(1.0 + 0.5 * h) - varphi(1.0 - 0.5 * h)) / h;
    const double by_derivative = (4.0 * d2 - d1) / 3.0;
    // Route two: stationary sum.
    double by_sum = 0.0;
    const int n = w_.dim();
    for (int xb = 0; xb < n; ++xb)
        for (int x = 0; x < n; ++x)
            if (w_.support(x, xb))
                by_sum += pi_w_[xb] * w_(x, xb) * std::log(w_(x, xb) / v_(x, xb));
    if (std::fabs(by_derivative - by_sum) > 1e-6)
        throw Error(ErrorCode::ConsistencyFailure, "derivative and stationary-sum routes disagree");
    return by_sum;
}

double DivergencePair::renyi(double s) const {
    if (s == 0.0) throw Error(ErrorCode::BadInput, "renyi order parameter s must be nonzero");
    return varphi(1.0 + s) / s;
}

FamilyDivergences family_divergences(const TiltedFamily& fam, double theta, double theta_bar,
                                     double s) {
    const ThetaPointPtr pt = fam.point(theta);
    const double phi_t = pt->phi;
    const double phi_tb = fam.phi(theta_bar);
    FamilyDivergences out;
    out.d = (theta - theta_bar) * pt->eta - phi_t + phi_tb;
    if (s == 0.0) {
        out.renyi = out.d;
    } else {
        const double mixed = fam.phi((1.0 + s) * theta - s * theta_bar);
        out.renyi = (mixed - (1.0 + s) * phi_t + s * phi_tb) / s;
    }
    return out;
}

LegendreResult legendre(const TiltedFamily& fam, double a) {
    const double eta0 = fam.eta(0.0);
    if (a == eta0) return {0.0, 0.0};
    const double theta_star = fam.eta_inverse(a);
    return {theta_star * a - fam.phi(theta_star), theta_star};
}

double theta_hat(const TiltedFamily& fam, double r) {
    if (std::fabs(fam.phi(1.0)) > 1e-8)
        throw Error(ErrorCode::BadInput, "theta_hat needs a hypothesis-testing family (phi(1)=0)");
    const double d01 = -fam.eta(0.0);
    if (r < -1e-12 || r > d01 * (1.0 + 1e-12) + 1e-12)
        throw Error(ErrorCode::OutOfRange, "r outside [0, D(W0||W1)]");
    if (r <= 0.0) return 1.0;
    if (r >= d01) return 0.0;
    // (theta - 1) phi'(theta) - phi(theta) decreases from d01 to 0 on [0,1].
    auto objective = [&](double t) {
        const ThetaPointPtr pt = fam.point(t);
        return (t - 1.0) * pt->eta - pt->phi;
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (objective(mid) > r ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

HoeffdingResult hoeffding_exponent(const TiltedFamily& fam, double r) {
    const double that = theta_hat(fam, r);
    const ThetaPointPtr pt_hat = fam.point(that);
    const double closed = that * pt_hat->eta - pt_hat->phi;

    // sup over theta in [0, 1) of (-theta r - phi(theta)) / (1 - theta).
    auto ratio = [&](double t) { return (-t * r - fam.phi(t)) / (1.0 - t); };
    const double by_sup = golden_max(ratio, 0.0, 1.0 - 1e-6, 201).value;

    // Same supremum through the materialized pair divergence
    // D_{1-theta}(W0||W1) = varphi(1-theta)/(-theta).
    DivergencePair pair(fam.base(), fam.point(1.0)->w_theta);
    auto ratio_pair = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double div = pair.renyi(-t);
        return t * (-r + div) / (1.0 - t);
    };
    const double by_pair = golden_max(ratio_pair, 1e-9, 1.0 - 1e-6, 201).value;

    // inf over s > 0 and theta in [theta_hat, 1] of D_{1+s}(W_theta||W_0).
    auto renyi_theta = [&](double s, double t) {
        if ((1.0 + s) * t > fam.overflow_safe_theta()) return 1e300;
        return (fam.phi((1.0 + s) * t) - (1.0 + s) * fam.phi(t)) / s;
    };
    double best = 1e300;
    double best_s = 1.0, best_t = std::min(that, 1.0);
    for (int i = 0; i <= 60; ++i) {
        const double s = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
        for (int j = 0; j <= 200; ++j) {
            const double t = that + (1.0 - that) * j / 200.0;
            const double val = renyi_theta(s, t);
            if (val < best) {
                best = val;
                best_s = s;
                best_t = t;
            }
        }
    }
    for (int round = 0; round < 3; ++round) {
        const double ls = std::log(best_s);
        best_s = std::exp(golden_min([&](double l) { return renyi_theta(std::exp(l), best_t); },
                                     std::min(ls - 2.0, std::log(1e-6)), ls + 2.0, 120)
                              .arg);
        best_t = golden_min([&](double t) { return renyi_theta(best_s, t); },
                            std::max(that, best_t - 0.2), std::min(1.0, best_t + 0.2), 120)
                     .arg;
        best = renyi_theta(best_s, best_t);
    }

    return {closed, {closed, by_sup, by_pair, best}};
}

MProjectionResult m_projection(const TiltedFamily& fam, double a, const TransitionMatrix& test_base) {
    const double theta_star = fam.eta_inverse(a);
    const TransitionMatrix& v = fam.base();
    const TransitionMatrix v_star = fam.point(theta_star)->w_theta;

    TiltedFamily other(test_base, fam.gen(), stationary(test_base));
    const double theta_w = other.eta_inverse(a);
    const TransitionMatrix w = other.point(theta_w)->w_theta;

    const double d_wv = DivergencePair(w, v).relative_entropy();
    const double d_wvstar = DivergencePair(w, v_star).relative_entropy();
    const double d_vstarv = DivergencePair(v_star, v).relative_entropy();
    return {theta_star, std::fabs(d_wv - d_wvstar - d_vstarv)};
}

TransitionMatrix marginalize_non_hidden(const TransitionMatrix& w_joint, int dim_x, int dim_y) {
    if (w_joint.dim() != dim_x * dim_y)
        throw Error(ErrorCode::BadInput, "joint dimension is not dim_x * dim_y");
    const auto flat = [dim_y](int x, int y) { return x * dim_y + y; };
    Matrix wx(dim_x);
    for (int x = 0; x < dim_x; ++x)
        for (int xp = 0; xp < dim_x; ++xp) {
            double first = 0.0;
            for (int y = 0; y < dim_y; ++y) first += w_joint(flat(x, y), flat(xp, 0));
            double acc = first;
            for (int yp = 1; yp < dim_y; ++yp) {
                double sum = 0.0;
                for (int y = 0; y < dim_y; ++y) sum += w_joint(flat(x, y), flat(xp, yp));
                if (std::fabs(sum - first) > 1e-10)
                    throw Error(ErrorCode::HiddenChain,
                                "X-marginal depends on the previous Y state");
                acc += sum;
            }
            wx(x, xp) = acc / dim_y;
        }
    return TransitionMatrix::validate(wx);
}

IpiReport ipi_check(const TransitionMatrix& w_joint, const TransitionMatrix& v_joint, int dim_x,
                    int dim_y, const std::vector<double>& s_list) {
    const TransitionMatrix wx = marginalize_non_hidden(w_joint, dim_x, dim_y);
    const TransitionMatrix vx = marginalize_non_hidden(v_joint, dim_x, dim_y);
    DivergencePair joint(w_joint, v_joint);
    DivergencePair marg(wx, vx);
    IpiReport rep;
    rep.d_joint = joint.relative_entropy();
    rep.d_marginal = marg.relative_entropy();
    rep.d_margin = rep.d_joint - rep.d_marginal;
    for (double s : s_list) {
        IpiEntry e;
        e.s = s;
        e.joint = joint.renyi(s);
        e.marginal = marg.renyi(s);
        e.margin = e.joint - e.marginal;
        rep.renyi.push_back(e);
    }
    return rep;
}

}  // namespace mcb
