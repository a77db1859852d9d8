#include "mcb/chain.hpp"

#include <cmath>
#include <numeric>
#include <queue>

#include "mcb/error.hpp"

namespace mcb {

TransitionMatrix TransitionMatrix::validate(const Matrix& raw) {
    const int n = raw.dim();
    if (n <= 0) throw Error(ErrorCode::NotSquare, "empty matrix");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double v = raw(r, c);
            if (!std::isfinite(v)) throw Error(ErrorCode::BadInput, "non-finite entry");
            if (v < 0.0) throw Error(ErrorCode::NegativeEntry, "entry below zero");
        }
    Matrix m = raw;
    for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += m(r, c);
        if (std::fabs(s - 1.0) > 1e-9)
            throw Error(ErrorCode::ColumnNotStochastic,
                        "column " + std::to_string(c) + " sums to " + std::to_string(s));
        for (int r = 0; r < n; ++r) m(r, c) /= s;
    }
    return TransitionMatrix(std::move(m));
}

bool TransitionMatrix::same_support(const TransitionMatrix& other) const {
    if (dim() != other.dim()) return false;
    for (int r = 0; r < dim(); ++r)
        for (int c = 0; c < dim(); ++c)
            if (support(r, c) != other.support(r, c)) return false;
    return true;
}

namespace {

// Digraph edge xbar -> x whenever m(x, xbar) > 0; BFS levels from node 0.
std::vector<int> bfs_levels(const Matrix& m, bool reverse) {
    const int n = m.dim();
    std::vector<int> level(n, -1);
    std::queue<int> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v) {
            const double w = reverse ? m(u, v) : m(v, u);
            if (w > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
        }
    }
    return level;
}

bool all_reached(const std::vector<int>& levels) {
    for (int l : levels)
        if (l < 0) return false;
    return true;
}

}  // namespace

bool support_irreducible(const Matrix& m) {
    return all_reached(bfs_levels(m, false)) && all_reached(bfs_levels(m, true));
}

Classification classify(const TransitionMatrix& w) {
    Classification out;
    const Matrix& m = w.matrix();
    const int n = m.dim();
    const std::vector<int> fwd = bfs_levels(m, false);
    out.irreducible = all_reached(fwd) && all_reached(bfs_levels(m, true));
    if (!out.irreducible) {
        out.period = 0;
        out.ergodic = false;
        return out;
    }
    // gcd of (level[xbar] + 1 - level[x]) over support edges xbar -> x.
    long long g = 0;
    for (int x = 0; x < n; ++x)
        for (int xbar = 0; xbar < n; ++xbar)
            if (m(x, xbar) > 0.0) g = std::gcd(g, static_cast<long long>(fwd[xbar] + 1 - fwd[x]));
    out.period = static_cast<int>(g == 0 ? 1 : std::llabs(g));
    out.ergodic = out.period == 1;
    return out;
}

namespace {

struct IterationResult {
    double eigenvalue;
    Vec vec;
    bool converged;
};

IterationResult power_iterate(const Matrix& m, bool transpose) {
    const int n = m.dim();
    Vec v(n, 1.0);
    double lambda = 0.0;
    constexpr int kCap = 100000;
    bool converged = false;
    for (int it = 0; it < kCap; ++it) {
        Vec next = transpose ? tmatvec(m, v) : matvec(m, v);
        double norm = max_abs(next);
        if (norm <= 0.0) break;  // cannot happen for irreducible input
        for (double& x : next) x /= norm;
        const double change = std::fabs(norm - lambda);
        lambda = norm;
        // Componentwise-relative residual: tilted matrices can have an
        // enormous dynamic range across components, and downstream
        // normalizations divide by the small ones.
        if (change <= 1e-13 * std::max(1.0, lambda)) {
            Vec image = transpose ? tmatvec(m, next) : matvec(m, next);
            double resid = 0.0;
            for (int i = 0; i < n; ++i) {
                const double scale = lambda * std::max(next[i], 1e-300);
                resid = std::max(resid, std::fabs(image[i] - lambda * next[i]) / scale);
            }
            if (resid <= 1e-12) {
                v = std::move(next);
                converged = true;
                break;
            }
        }
        v = std::move(next);
    }
    return {lambda, std::move(v), converged};
}

}  // namespace

PerronData perron(const Matrix& m) {
    const int n = m.dim();
    if (!support_irreducible(m)) throw Error(ErrorCode::NotIrreducible, "support digraph not strongly connected");

    if (n == 1) {
        const double c = m(0, 0);
        return PerronData{c, Vec{1.0}, Vec{1.0}, 0.0};
    }

    IterationResult right = power_iterate(m, false);
    IterationResult left = power_iterate(m, true);
    double shift = 0.0;
    if (!right.converged || !left.converged) {
        // Near-periodic spectrum: shift the diagonal, which preserves the
        // eigenvectors and moves the eigenvalue by exactly the shift.
        double trace = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i) trace += m(i, i);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) total += m(r, c);
        shift = trace > 0.0 ? trace / n : total / (n * n);
        Matrix shifted = m;
        for (int i = 0; i < n; ++i) shifted(i, i) += shift;
        right = power_iterate(shifted, false);
        left = power_iterate(shifted, true);
        if (!right.converged || !left.converged)
            throw Error(ErrorCode::NoConvergence, "power iteration hit the iteration cap");
    }

    // Rayleigh quotient through both eigenvectors: quadratically accurate.
    const Vec image = matvec(m, right.vec);
    const double lambda = dot(left.vec, image) / dot(left.vec, right.vec);

    PerronData out;
    out.eigenvalue = lambda;
    out.right_vec = std::move(right.vec);
    out.left_vec = std::move(left.vec);

    const double rsum = vec_sum(out.right_vec);
    for (double& x : out.right_vec) x /= rsum;
    double lmin = out.left_vec[0];
    for (double x : out.left_vec) lmin = std::min(lmin, x);
    for (double& x : out.left_vec) x /= lmin;

    double resid = 0.0;
    const Vec ri = matvec(m, out.right_vec);
    const Vec li = tmatvec(m, out.left_vec);
    for (int i = 0; i < n; ++i) {
        resid = std::max(resid, std::fabs(ri[i] - lambda * out.right_vec[i]));
        resid = std::max(resid, std::fabs(li[i] - lambda * out.left_vec[i]));
    }
    out.residual = resid;
    return out;
}

Vec stationary(const TransitionMatrix& w) {
    const Classification cls = classify(w);
    if (!cls.ergodic) throw Error(ErrorCode::NotErgodic, "stationary distribution needs an ergodic chain");
    const int n = w.dim();
    // pi = W pi with sum(pi) = 1: replace the last balance row by the
    // normalization constraint.
    Matrix sys(n);
    Vec rhs(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) sys(r, c) = (r == c ? 1.0 : 0.0) - w(r, c);
    for (int c = 0; c < n; ++c) sys(n - 1, c) = 1.0;
    rhs[n - 1] = 1.0;
    Vec pi = solve(std::move(sys), std::move(rhs));
    for (double& x : pi)
        if (x < 0.0 && x > -1e-14) x = 0.0;
    return pi;
}

FundamentalMatrix fundamental(const TransitionMatrix& w) {
    const int n = w.dim();
    FundamentalMatrix out;
    out.pi = stationary(w);
    out.a = Matrix(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.a(r, c) = out.pi[r];
    Matrix sys(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) sys(r, c) = (r == c ? 1.0 : 0.0) - w(r, c) + out.a(r, c);
    out.z = solve(std::move(sys), identity(n));
    return out;
}

}  // namespace mcb
