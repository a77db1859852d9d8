#pragma once

#include <vector>

#include "mcb/linalg.hpp"

namespace mcb {

// Column-stochastic transition matrix over a finite alphabet.
// entry(x, xbar) = W(x|xbar) = probability of moving FROM xbar TO x,
// so every column sums to 1. Immutable after validation.
class TransitionMatrix {
  public:
    TransitionMatrix() = default;  // empty; validate() is the real entry point

    // Checks squareness, nonnegativity and column sums (tolerance 1e-9),
    // then renormalizes columns exactly. Throws Error on violation.
    static TransitionMatrix validate(const Matrix& raw);

    int dim() const { return m_.dim(); }
    double operator()(int x, int xbar) const { return m_(x, xbar); }
    const Matrix& matrix() const { return m_; }
    bool support(int x, int xbar) const { return m_(x, xbar) > 0.0; }

    bool same_support(const TransitionMatrix& other) const;

  private:
    explicit TransitionMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

struct Classification {
    bool irreducible = false;
    bool ergodic = false;
    int period = 0;
};

// Dominant eigendata of an irreducible nonnegative matrix.
// right_vec is normalized to sum 1 (distribution convention),
// left_vec so that its minimum entry is exactly 1.
struct PerronData {
    double eigenvalue = 0.0;
    Vec right_vec;
    Vec left_vec;
    double residual = 0.0;  // max of the two sup-norm eigen-residuals
};

// Z = (I - (W - A))^{-1} with A the rank-one matrix whose columns all
// equal the stationary distribution pi.
struct FundamentalMatrix {
    Matrix z;
    Matrix a;
    Vec pi;
};

// Strong connectivity and period of the support digraph.
Classification classify(const TransitionMatrix& w);

// Irreducibility of an arbitrary nonnegative matrix's support digraph.
bool support_irreducible(const Matrix& m);

// Power iteration with sup-norm normalization (tolerance 1e-13 on the
// eigenvalue change, cap 100000 iterations); falls back to a diagonal
// shift for near-periodic spectra. Deterministic given m.
PerronData perron(const Matrix& m);

// Stationary distribution of an ergodic chain via dense linear solve.
Vec stationary(const TransitionMatrix& w);

FundamentalMatrix fundamental(const TransitionMatrix& w);

}  // namespace mcb
