#include "mcb/hypothesis.hpp"

#include <cmath>
#include <limits>

#include "mcb/divergence.hpp"
#include "mcb/error.hpp"
#include "mcb/optimize.hpp"
#include "mcb/stats.hpp"

namespace mcb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log1mexp(double x) {
    return x > -0.6931471805599453 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

}  // namespace

HTFamily::HTFamily(TransitionMatrix w0, Vec p0, TransitionMatrix w1, Vec p1)
    : w0_(std::move(w0)), w1_(std::move(w1)), p0_(std::move(p0)), p1_(std::move(p1)) {
    if (w0_.dim() != w1_.dim()) throw Error(ErrorCode::BadInput, "alphabet sizes differ");
    if (!w0_.same_support(w1_)) throw Error(ErrorCode::SupportMismatch, "supports differ");
    const int n = w0_.dim();
    for (int x = 0; x < n; ++x)
        if (!(p0_[x] > 0.0) || !(p1_[x] > 0.0))
            throw Error(ErrorCode::BadInput, "initial distributions must have full support");

    Matrix g(n);
    Vec h(n, 0.0);
    for (int x = 0; x < n; ++x) {
        for (int xb = 0; xb < n; ++xb)
            if (w0_.support(x, xb)) g(x, xb) = std::log(w1_(x, xb) / w0_(x, xb));
        h[x] = std::log(p1_[x] / p0_[x]);
    }
    GeneratorSpec gen;
    gen.g = std::move(g);
    gen.h = std::move(h);
    gen.label = "log-likelihood ratio";
    fam_ = std::make_unique<TiltedFamily>(w0_, std::move(gen), p0_);

    if (std::fabs(fam_->phi(0.0)) > 1e-10 || std::fabs(fam_->phi(1.0)) > 1e-10)
        throw Error(ErrorCode::ConsistencyFailure, "potential does not vanish at the endpoints");
    d01_ = -fam_->eta(0.0);
    d10_ = fam_->eta(1.0);
}

namespace {

void check_r(const HTFamily& ht, double r) {
    if (r < -1e-12 || r > ht.d01() * (1.0 + 1e-12) + 1e-12)
        throw Error(ErrorCode::OutOfRange, "r outside [0, D(W0||W1)]");
}

}  // namespace

double ht_lower(const HTFamily& ht, long long n, double r) {
    check_r(ht, r);
    const TiltedFamily& fam = ht.family();
    auto objective = [&](double t) {
        const ThetaPointPtr pt = fam.point(t);
        return (n * (-t * r - pt->phi) - pt->delta_lower) / (1.0 - t);
    };
    return golden_max(objective, 0.0, 1.0 - 1e-6, 401).value;
}

HTUpperResult ht_upper(const HTFamily& ht, long long n, double r) {
    check_r(ht, r);
    const TiltedFamily& fam = ht.family();
    const double that = theta_hat(fam, r);
    if (that >= 1.0 - 1e-9) return {kInf, {}, false};
    const ThetaPointPtr pt_hat = fam.point(that);
    const double lim = fam.overflow_safe_theta();

    auto objective = [&](double s, double theta) -> double {
        if (s <= 0.0 || theta <= that || theta >= 1.0) return kInf;
        if ((1.0 + s) * theta > lim) return kInf;
        const ThetaPointPtr pt = fam.point(theta);
        const ThetaPointPtr pt_up = fam.point((1.0 + s) * theta);
        const double d_renyi = (pt_up->phi - (1.0 + s) * pt->phi) / s;
        const double corr = (pt_up->delta_upper - (1.0 + s) * pt->delta_lower) / s;
        const double d_hat = (that - theta) * pt_hat->eta - pt_hat->phi + pt->phi;
        const double expo = -static_cast<double>(n) * d_hat - pt->delta_lower +
                            (1.0 - theta) * pt_hat->delta_upper / (1.0 - that);
        // The union step carries a factor 2 inside the log.
        const double arg = expo + 0.6931471805599453;
        if (arg >= 0.0) return kInf;
        return n * d_renyi + corr - (1.0 + s) / s * log1mexp(arg);
    };

    double best = kInf, best_s = 1.0, best_t = 0.5 * (that + 1.0);
    for (int i = 0; i <= 40; ++i) {
        const double s = std::pow(10.0, -3.0 + 6.0 * i / 40.0);
        for (int j = 1; j < 200; ++j) {
            const double t = that + (1.0 - that) * j / 200.0;
            const double val = objective(s, t);
            if (val < best) {
                best = val;
                best_s = s;
                best_t = t;
            }
        }
    }
    if (!std::isfinite(best)) return {kInf, {}, false};
    for (int round = 0; round < 3; ++round) {
        const double ls = std::log(best_s);
        best_s = std::exp(
            golden_min([&](double l) { return objective(std::exp(l), best_t); }, ls - 2.0, ls + 2.0, 40)
                .arg);
        best_t = golden_min([&](double t) { return objective(best_s, t); },
                            std::max(that + 1e-12, best_t - 0.1), std::min(1.0 - 1e-12, best_t + 0.1),
                            40)
                     .arg;
        best = objective(best_s, best_t);
    }
    return {best, {best_s, best_t}, true};
}

HTBoundReport ht_report(const HTFamily& ht, long long n, double r,
                        std::optional<double> exact_neg_log_beta) {
    HTBoundReport rep;
    rep.n = n;
    rep.r = r;
    rep.epsilon = std::exp(-static_cast<double>(n) * r);
    rep.lower_neg_log_beta = ht_lower(ht, n, r);
    const HTUpperResult up = ht_upper(ht, n, r);
    rep.upper_neg_log_beta = up.value;
    rep.optimizer = up.optimizer;
    rep.feasible = up.feasible;
    rep.exact_neg_log_beta = exact_neg_log_beta;
    return rep;
}

double md_expansion(const HTFamily& ht, long long n, double t, double r) {
    if (!(t > 0.0 && t < 0.5)) throw Error(ErrorCode::OutOfRange, "t must lie in (0, 1/2)");
    if (!(r > 0.0)) throw Error(ErrorCode::OutOfRange, "r must be positive");
    const double fisher0 = ht.family().fisher(0.0);
    return ht.d01() * static_cast<double>(n) -
           std::pow(static_cast<double>(n), 1.0 - t) * std::sqrt(2.0 * fisher0 * r);
}

InfoSpectrumBounds info_spectrum_bounds(const HTFamily& ht, long long n, double epsilon,
                                        double budget) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::OutOfRange, "epsilon in (0,1)");
    InfoSpectrumBounds out;
    const bool exact =
        (n + 1) * std::log(static_cast<double>(ht.w0().dim())) <= std::log(budget);
    if (exact) {
        const PathDistribution dist =
            enumerate_paths(ht.w0(), ht.p0(), ht.family().gen(), n,
                            SecondChain{ht.w1(), ht.p1()}, budget);
        // Strict CDF under P1 jumps at atom values; C_k is the mass of the
        // first k atoms.
        const std::size_t m = dist.atoms.size();
        std::vector<double> cum(m + 1, 0.0);
        for (std::size_t k = 0; k < m; ++k) cum[k + 1] = cum[k] + dist.atoms[k].p1;
        std::size_t big = 0;  // largest k with C_k <= epsilon
        while (big < m && cum[big + 1] <= epsilon) ++big;
        out.lower = big < m ? dist.atoms[big].value : dist.atoms.back().value;
        double up = kInf;
        for (std::size_t k = 1; k <= m; ++k) {
            if (cum[k] > epsilon)
                up = std::min(up, dist.atoms[k - 1].value - std::log(cum[k] - epsilon));
        }
        out.upper = up;
        out.approximate = false;
        return out;
    }
    // Gaussian surrogate under the alternative measure; no guarantee.
    const TiltedFamily& fam = ht.family();
    const double mu = static_cast<double>(n) * fam.eta(1.0);
    const double sigma = std::sqrt(static_cast<double>(n) * fam.fisher(1.0));
    out.lower = mu + sigma * normal_quantile(epsilon);
    double up = kInf;
    for (int i = 1; i <= 400; ++i) {
        const double delta = (1.0 - epsilon) * i / 401.0;
        up = std::min(up, mu + sigma * normal_quantile(epsilon + delta) - std::log(delta));
    }
    out.upper = up;
    out.approximate = true;
    return out;
}

double stein_strassen(const HTFamily& ht, long long n, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::OutOfRange, "epsilon in (0,1)");
    const double quant = epsilon == 0.5 ? 0.0 : normal_quantile(epsilon);
    return ht.d10() * static_cast<double>(n) +
           std::sqrt(static_cast<double>(n) * ht.family().fisher(1.0)) * quant;
}

ExactBeta exact_beta(const HTFamily& ht, long long n, double epsilon, double budget,
                     bool randomized) {
    if (epsilon < 0.0 || epsilon > 1.0) throw Error(ErrorCode::OutOfRange, "epsilon in [0,1]");
    const PathDistribution dist = enumerate_paths(ht.w0(), ht.p0(), ht.family().gen(), n,
                                                  SecondChain{ht.w1(), ht.p1()}, budget);
    // Spend P1-mass on the atoms with the smallest likelihood ratio first:
    // they buy the most P0-mass per unit of first-kind error.
    double spent1 = 0.0, gained0 = 0.0;
    ExactBeta out;
    out.randomization = 0.0;
    out.threshold = dist.atoms.empty() ? 0.0 : dist.atoms.front().value;
    for (const PathAtom& atom : dist.atoms) {
        if (spent1 + atom.p1 <= epsilon + 1e-15) {
            spent1 += atom.p1;
            gained0 += atom.p0;
            continue;
        }
        out.threshold = atom.value;
        if (randomized && atom.p1 > 0.0) {
            const double gamma = std::max(0.0, (epsilon - spent1) / atom.p1);
            out.randomization = gamma;
            gained0 += gamma * atom.p0;
        }
        break;
    }
    out.beta = 1.0 - gained0;
    if (out.beta < 0.0) out.beta = 0.0;
    return out;
}

}  // namespace mcb
