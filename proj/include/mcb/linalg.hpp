#pragma once

#include <cstddef>
#include <vector>

namespace mcb {

using Vec = std::vector<double>;

// Small dense square matrix, row-major. Entry (r, c) is row r, column c.
// Throughout the library a transition matrix stores W(x|xbar) at
// (r = x, c = xbar), i.e. columns are indexed by the previous state.
class Matrix {
  public:
    Matrix() = default;
    explicit Matrix(int dim, double fill = 0.0)
        : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, fill) {}

    int dim() const { return dim_; }
    double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * dim_ + c]; }
    double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * dim_ + c]; }

    const std::vector<double>& data() const { return a_; }

    bool operator==(const Matrix&) const = default;

  private:
    int dim_ = 0;
    std::vector<double> a_;
};

Vec matvec(const Matrix& m, const Vec& v);
// Transpose product: (m^T v)(c) = sum_r m(r,c) v(r).
Vec tmatvec(const Matrix& m, const Vec& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix identity(int dim);

double dot(const Vec& a, const Vec& b);
double max_abs(const Vec& v);
double max_abs_diff(const Matrix& a, const Matrix& b);
double vec_sum(const Vec& v);

// Solves a x = b by Gaussian elimination with partial pivoting.
// Throws Error(SingularSystem) when a pivot collapses.
Vec solve(Matrix a, Vec b);

// Same factorization applied to dim right-hand sides: returns a^{-1} b.
Matrix solve(Matrix a, Matrix b);

}  // namespace mcb
