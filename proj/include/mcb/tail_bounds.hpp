#pragma once

#include <optional>

#include "mcb/expfamily.hpp"
#include "mcb/side.hpp"

namespace mcb {

struct TailOptimizer {
    double s = 0.0;
    double theta = 0.0;
};

struct TailBoundReport {
    long long n = 0;
    double a = 0.0;
    TailSide side = TailSide::UpperTail;
    double lower_bound_on_neg_log = 0.0;
    double upper_bound_on_neg_log = 0.0;
    TailOptimizer optimizer;
    bool feasible = false;
    std::optional<double> exact_neg_log;
};

// Lower bound on -log P{gtilde^n >=/<= n a}: n D(W_{theta*}||W_0) minus
// the finite-length correction, with theta* = eta^{-1}(a).
double tail_lower(const TiltedFamily& fam, long long n, double a, TailSide side);

struct TailUpperResult {
    double value = 0.0;
    TailOptimizer optimizer;
    bool feasible = false;
};

// Upper bound on -log P: numerical infimum over s > 0 and theta beyond
// theta*. Pairs where the log argument collapses are infeasible and
// skipped; when nothing is feasible the report carries value = +inf.
TailUpperResult tail_upper(const TiltedFamily& fam, long long n, double a, TailSide side);

TailBoundReport tail_report(const TiltedFamily& fam, long long n, double a, TailSide side,
                            std::optional<double> exact_neg_log = {});

// Large-deviation rate at threshold eta(0) +/- delta.
double ld_rate(const TiltedFamily& fam, double delta, TailSide side);

// Moderate-deviation rate delta^2 / (2 phi''(0)); t only validated.
double md_rate(const TiltedFamily& fam, double t, double delta);

}  // namespace mcb
