#include "mcb/expfamily.hpp"

#include <bit>
#include <cmath>

#include "mcb/error.hpp"

namespace mcb {

namespace {

double max_abs_g_on_support(const TransitionMatrix& w, const Matrix& g) {
    double m = 0.0;
    for (int x = 0; x < w.dim(); ++x)
        for (int xb = 0; xb < w.dim(); ++xb)
            if (w.support(x, xb)) m = std::max(m, std::fabs(g(x, xb)));
    return m;
}

}  // namespace

NondegeneracyReport check_nondegenerate(const TransitionMatrix& w, const GeneratorSpec& gen) {
    const int n = w.dim();
    // Unknowns: f(1..n-1) with the gauge f(0) = 0, plus c. Normal equations
    // of the per-edge residual g(x,xbar) - f(x) + f(xbar) - c.
    const int m = n;  // n-1 free f entries + c
    Matrix ata(m);
    Vec atb(m, 0.0);
    auto col_of_f = [](int state) { return state - 1; };  // state >= 1
    const int col_c = m - 1;
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb) {
            if (!w.support(x, xb)) continue;
            // Row: coeff +1 on f(x), -1 on f(xbar), +1 on c; rhs g(x,xbar).
            Vec row(m, 0.0);
            if (x >= 1) row[col_of_f(x)] += 1.0;
            if (xb >= 1) row[col_of_f(xb)] -= 1.0;
            row[col_c] += 1.0;
            const double rhs = gen.g(x, xb);
            for (int i = 0; i < m; ++i) {
                if (row[i] == 0.0) continue;
                atb[i] += row[i] * rhs;
                for (int j = 0; j < m; ++j) ata(i, j) += row[i] * row[j];
            }
        }
    // Tiny ridge keeps the normal equations solvable when the support graph
    // leaves a direction unconstrained; it does not move the residual.
    for (int i = 0; i < m; ++i) ata(i, i) += 1e-12;
    Vec sol = solve(std::move(ata), std::move(atb));

    NondegeneracyReport rep;
    rep.f = Vec(n, 0.0);
    for (int s = 1; s < n; ++s) rep.f[s] = sol[col_of_f(s)];
    rep.c = sol[col_c];
    double resid = 0.0;
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb)
            if (w.support(x, xb))
                resid = std::max(resid, std::fabs(gen.g(x, xb) - rep.f[x] + rep.f[xb] - rep.c));
    rep.residual = resid;
    rep.degenerate = resid <= 1e-9;
    return rep;
}

Matrix tilt(const TransitionMatrix& w, const GeneratorSpec& gen, double theta) {
    const int n = w.dim();
    Matrix out(n);
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb) {
            const double wv = w(x, xb);
            if (wv == 0.0) continue;
            const double e = theta * gen.g(x, xb);
            if (std::fabs(e) > 700.0)
                throw Error(ErrorCode::Overflow, "theta * g exceeds the exp range on the support");
            out(x, xb) = wv * std::exp(e);
        }
    return out;
}

TiltedFamily::TiltedFamily(TransitionMatrix base, GeneratorSpec gen, Vec initial,
                           bool allow_degenerate)
    : base_(std::move(base)), gen_(std::move(gen)), initial_(std::move(initial)) {
    const int n = base_.dim();
    if (gen_.g.dim() != n) throw Error(ErrorCode::BadInput, "generator dimension mismatch");
    if (gen_.h.empty()) gen_.h = Vec(n, 0.0);
    if (static_cast<int>(gen_.h.size()) != n || static_cast<int>(initial_.size()) != n)
        throw Error(ErrorCode::BadInput, "initial weight dimension mismatch");
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb)
            if (base_.support(x, xb) && !std::isfinite(gen_.g(x, xb)))
                throw Error(ErrorCode::BadInput, "generator not finite on the support");
    double psum = 0.0;
    for (double p : initial_) {
        if (p < 0.0) throw Error(ErrorCode::BadInput, "negative initial probability");
        psum += p;
    }
    if (std::fabs(psum - 1.0) > 1e-9) throw Error(ErrorCode::BadInput, "initial distribution not normalized");

    const Classification cls = classify(base_);
    if (!cls.ergodic) throw Error(ErrorCode::NotErgodic, "base chain must be ergodic");

    nondeg_ = check_nondegenerate(base_, gen_);
    if (nondeg_.degenerate && !allow_degenerate)
        throw Error(ErrorCode::DegenerateGenerator,
                    "g is of the form f(x) - f(xbar) + c on the support");

    const double gmax = max_abs_g_on_support(base_, gen_.g);
    theta_limit_ = gmax > 0.0 ? std::min(kThetaMax, 690.0 / gmax) : kThetaMax;
}

TiltedFamily TiltedFamily::iid(const Vec& p, const Vec& g_single) {
    const int n = static_cast<int>(p.size());
    Matrix w(n);
    Matrix g(n);
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb) {
            w(x, xb) = p[x];
            g(x, xb) = g_single[x];
        }
    return TiltedFamily(TransitionMatrix::validate(w), GeneratorSpec::with_zero_h(std::move(g)), p);
}

ThetaPointPtr TiltedFamily::point(double theta) const {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(theta);
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    const int n = base_.dim();
    auto pt = std::make_shared<ThetaPoint>();
    pt->theta = theta;

    const Matrix tilted = tilt(base_, gen_, theta);
    pt->perron = perron(tilted);
    pt->lambda = pt->perron.eigenvalue;
    pt->phi = std::log(pt->lambda);

    // W_theta(x|xbar) = lambda^{-1} v(x) Wtilde(x|xbar) / v(xbar); the left
    // eigenvector enters only through ratios, so its scale is irrelevant.
    const Vec& v = pt->perron.left_vec;
    Matrix wt(n);
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb)
            wt(x, xb) = tilted(x, xb) * v[x] / (pt->lambda * v[xb]);
    pt->w_theta = TransitionMatrix::validate(wt);

    const Vec& ptilde = pt->perron.right_vec;
    pt->pi_theta = Vec(n, 0.0);
    double zsum = 0.0;
    for (int x = 0; x < n; ++x) {
        pt->pi_theta[x] = v[x] * ptilde[x];
        zsum += pt->pi_theta[x];
    }
    for (double& x : pt->pi_theta) x /= zsum;

    double eta = 0.0;
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb)
            if (base_.support(x, xb)) eta += pt->w_theta(x, xb) * pt->pi_theta[xb] * gen_.g(x, xb);
    pt->eta = eta;

    Vec w_vec(n, 0.0);
    for (int x = 0; x < n; ++x) w_vec[x] = initial_[x] * std::exp(theta * gen_.h[x]);
    double vmax = v[0];
    for (double x : v) vmax = std::max(vmax, x);
    pt->delta_upper = std::log(dot(v, w_vec));
    pt->delta_lower = pt->delta_upper - std::log(vmax);

    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() > 500000) cache_.clear();  // memo table, not a store of record
    cache_.emplace(key, pt);
    return pt;
}

double TiltedFamily::eta_inverse(double a, double theta_max) const {
    const double lim = std::min(theta_max, theta_limit_);
    double lo = -lim, hi = lim;
    const double eta_lo = eta(lo), eta_hi = eta(hi);
    if (!(a > eta_lo && a < eta_hi)) {
        if (a == eta(0.0)) return 0.0;
        throw Error(ErrorCode::OutOfRange, "target mean not attained inside the theta range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double e = eta(mid);
        if (std::fabs(e - a) <= 1e-10) return mid;
        (e < a ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double TiltedFamily::fisher(double theta) const {
    const double h = 1e-5;
    const double d1 = (eta(theta + h) - eta(theta - h)) / (2.0 * h);
    const double d2 = (eta(theta + 0.5 * h) - eta(theta - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

double TiltedFamily::cgf_exact(long long n, double theta) const {
    if (n < 1) throw Error(ErrorCode::BadInput, "n must be positive");
    const int dim = base_.dim();
    const Matrix tilted = tilt(base_, gen_, theta);
    Vec r(dim, 0.0);
    for (int x = 0; x < dim; ++x) r[x] = initial_[x] * std::exp(theta * gen_.h[x]);
    double logscale = 0.0;
    for (long long i = 0; i < n; ++i) {
        r = matvec(tilted, r);
        const double m = max_abs(r);
        logscale += std::log(m);
        for (double& x : r) x /= m;
    }
    return std::log(vec_sum(r)) + logscale;
}

TiltedFamily::CgfBounds TiltedFamily::cgf_bounds(long long n, double theta) const {
    if (n < 1) throw Error(ErrorCode::BadInput, "n must be positive");
    const ThetaPointPtr pt = point(theta);
    return {n * pt->phi + pt->delta_lower, n * pt->phi + pt->delta_upper};
}

namespace {

struct GVectors {
    Vec cond;   // conditional mean of g given the previous state
    Vec joint;  // joint mass W(x|xbar) pi(xbar) g(x,xbar), summed over xbar
    double mean;
    double second;
};

GVectors g_vectors(const TransitionMatrix& w, const GeneratorSpec& gen, const Vec& pi) {
    const int n = w.dim();
    GVectors out{Vec(n, 0.0), Vec(n, 0.0), 0.0, 0.0};
    for (int x = 0; x < n; ++x)
        for (int xb = 0; xb < n; ++xb) {
            if (!w.support(x, xb)) continue;
            const double g = gen.g(x, xb);
            out.cond[xb] += w(x, xb) * g;
            const double joint = w(x, xb) * pi[xb];
            out.joint[x] += joint * g;
            out.mean += joint * g;
            out.second += joint * g * g;
        }
    return out;
}

}  // namespace

double asymptotic_variance(const TransitionMatrix& w, const GeneratorSpec& gen) {
    const FundamentalMatrix fm = fundamental(w);
    const GVectors gv = g_vectors(w, gen, fm.pi);
    const double v0 = gv.second - gv.mean * gv.mean;
    double cross = 0.0;
    const int n = w.dim();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) cross += gv.cond[p] * (fm.z(p, q) - fm.a(p, q)) * gv.joint[q];
    return v0 + 2.0 * cross;
}

Vec stationary_derivative(const TransitionMatrix& w, const GeneratorSpec& gen) {
    const FundamentalMatrix fm = fundamental(w);
    const GVectors gv = g_vectors(w, gen, fm.pi);
    const int n = w.dim();
    Vec out(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out[r] += (fm.z(r, c) - fm.a(r, c)) * gv.joint[c];
    return out;
}

}  // namespace mcb
