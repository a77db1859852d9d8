#pragma once

#include <cmath>

namespace mcb {

struct OptResult {
    double arg = 0.0;
    double value = 0.0;
};

// Grid scan followed by golden-section refinement inside the bracketing
// grid cell. Deterministic: fixed grid, fixed iteration count.
template <class F>
OptResult golden_min(F&& f, double lo, double hi, int grid_points) {
    if (grid_points < 2) grid_points = 2;
    double best_arg = lo, best_val = f(lo);
    for (int i = 1; i <= grid_points; ++i) {
        const double x = lo + (hi - lo) * i / grid_points;
        const double v = f(x);
        if (v < best_val) {
            best_val = v;
            best_arg = x;
        }
    }
    const double step = (hi - lo) / grid_points;
    double a = std::max(lo, best_arg - step);
    double b = std::min(hi, best_arg + step);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    const double mid = 0.5 * (a + b);
    const double vm = f(mid);
    if (vm < best_val) return {mid, vm};
    return {best_arg, best_val};
}

template <class F>
OptResult golden_max(F&& f, double lo, double hi, int grid_points) {
    auto neg = [&](double x) { return -f(x); };
    OptResult r = golden_min(neg, lo, hi, grid_points);
    return {r.arg, -r.value};
}

}  // namespace mcb
