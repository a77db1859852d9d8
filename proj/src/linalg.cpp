#include "mcb/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "mcb/error.hpp"

namespace mcb {

Vec matvec(const Matrix& m, const Vec& v) {
    const int n = m.dim();
    Vec out(n, 0.0);
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) acc += m(r, c) * v[c];
        out[r] = acc;
    }
    return out;
}

Vec tmatvec(const Matrix& m, const Vec& v) {
    const int n = m.dim();
    Vec out(n, 0.0);
    for (int r = 0; r < n; ++r) {
        const double vr = v[r];
        for (int c = 0; c < n; ++c) out[c] += m(r, c) * vr;
    }
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    const int n = a.dim();
    Matrix out(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

Matrix identity(int dim) {
    Matrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::fabs(a(r, c) - b(r, c)));
    return m;
}

double vec_sum(const Vec& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

namespace {

// In-place LU with partial pivoting; perm receives the row permutation.
void lu_decompose(Matrix& a, std::vector<int>& perm) {
    const int n = a.dim();
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(a(perm[col], col));
        for (int r = col + 1; r < n; ++r) {
            const double cand = std::fabs(a(perm[r], col));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best < 1e-300) throw Error(ErrorCode::SingularSystem, "pivot collapsed in linear solve");
        std::swap(perm[col], perm[piv]);
        const int pr = perm[col];
        for (int r = col + 1; r < n; ++r) {
            const int rr = perm[r];
            const double f = a(rr, col) / a(pr, col);
            a(rr, col) = f;
            for (int c = col + 1; c < n; ++c) a(rr, c) -= f * a(pr, c);
        }
    }
}

Vec lu_solve(const Matrix& lu, const std::vector<int>& perm, const Vec& b) {
    const int n = lu.dim();
    Vec y(n);
    for (int r = 0; r < n; ++r) {
        double acc = b[perm[r]];
        for (int c = 0; c < r; ++c) acc -= lu(perm[r], c) * y[c];
        y[r] = acc;
    }
    Vec x(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = y[r];
        for (int c = r + 1; c < n; ++c) acc -= lu(perm[r], c) * x[c];
        x[r] = acc / lu(perm[r], r);
    }
    return x;
}

}  // namespace

Vec solve(Matrix a, Vec b) {
    std::vector<int> perm;
    lu_decompose(a, perm);
    return lu_solve(a, perm, b);
}

Matrix solve(Matrix a, Matrix b) {
    const int n = a.dim();
    std::vector<int> perm;
    lu_decompose(a, perm);
    Matrix out(n);
    Vec col(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        Vec x = lu_solve(a, perm, col);
        for (int i = 0; i < n; ++i) out(i, j) = x[i];
    }
    return out;
}

}  // namespace mcb
