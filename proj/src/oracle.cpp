#include "mcb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "mcb/error.hpp"
#include "mcb/stats.hpp"

namespace mcb {

namespace {

long long quantize(double value) { return std::llround(value * 1e12); }

}  // namespace

PathDistribution enumerate_paths(const TransitionMatrix& w, const Vec& p0, const GeneratorSpec& gen,
                                 long long n, const std::optional<SecondChain>& second,
                                 double budget) {
    const int dim = w.dim();
    if (n < 1) throw Error(ErrorCode::BadInput, "n must be positive");
    if ((n + 1) * std::log(static_cast<double>(dim)) > std::log(budget))
        throw Error(ErrorCode::BudgetExceeded, "path count exceeds the enumeration budget");

    struct Mass {
        double p0 = 0.0;
        double p1 = 0.0;
    };
    std::unordered_map<long long, Mass> acc;
    acc.reserve(1024);

    const bool two = second.has_value();
    const TransitionMatrix* w1 = two ? &second->w : nullptr;

    // Depth-first walk; a branch dead under both measures cannot contribute.
    auto walk = [&](auto&& self, long long depth, int state, double value, double q0,
                    double q1) -> void {
        if (depth == n) {
            Mass& m = acc[quantize(value)];
            m.p0 += q0;
            m.p1 += q1;
            return;
        }
        for (int next = 0; next < dim; ++next) {
            const double t0 = w(next, state);
            const double t1 = two ? (*w1)(next, state) : 0.0;
            if (t0 == 0.0 && t1 == 0.0) continue;
            self(self, depth + 1, next, value + gen.g(next, state), q0 * t0, q1 * t1);
        }
    };
    for (int x0 = 0; x0 < dim; ++x0) {
        const double q0 = p0[x0];
        const double q1 = two ? second->p[x0] : 0.0;
        if (q0 == 0.0 && q1 == 0.0) continue;
        walk(walk, 0, x0, gen.h[x0], q0, q1);
    }

    PathDistribution out;
    out.n = n;
    out.has_second = two;
    out.atoms.reserve(acc.size());
    for (const auto& [key, mass] : acc)
        out.atoms.push_back({static_cast<double>(key) * 1e-12, mass.p0, mass.p1});
    std::sort(out.atoms.begin(), out.atoms.end(),
              [](const PathAtom& a, const PathAtom& b) { return a.value < b.value; });
    for (const PathAtom& a : out.atoms) out.total_w0 += a.p0;
    return out;
}

double exact_tail(const PathDistribution& dist, double a, TailSide side) {
    const double na = static_cast<double>(dist.n) * a;
    double acc = 0.0;
    for (const PathAtom& atom : dist.atoms) {
        if (side == TailSide::UpperTail ? atom.value >= na : atom.value <= na) acc += atom.p0;
    }
    return acc;
}

EmpiricalSummary sample(const TransitionMatrix& w, const Vec& p0, const GeneratorSpec& gen,
                        long long n, long long count, std::uint64_t seed,
                        const std::vector<double>& thresholds) {
    if (count < 1) throw Error(ErrorCode::BadInput, "count must be positive");
    const int dim = w.dim();

    // Per-column transition CDFs and the initial CDF.
    std::vector<double> cdf(static_cast<std::size_t>(dim) * dim);
    for (int c = 0; c < dim; ++c) {
        double acc = 0.0;
        for (int r = 0; r < dim; ++r) {
            acc += w(r, c);
            cdf[static_cast<std::size_t>(c) * dim + r] = acc;
        }
    }
    std::vector<double> init_cdf(dim);
    {
        double acc = 0.0;
        for (int r = 0; r < dim; ++r) {
            acc += p0[r];
            init_cdf[r] = acc;
        }
    }
    auto draw = [dim](const double* c, double u) {
        for (int r = 0; r < dim - 1; ++r)
            if (u < c[r]) return r;
        return dim - 1;
    };

    std::vector<double> values(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        int state = draw(init_cdf.data(), rng.next_double());
        double val = gen.h[state];
        for (long long step = 0; step < n; ++step) {
            const int next = draw(cdf.data() + static_cast<std::size_t>(state) * dim,
                                  rng.next_double());
            val += gen.g(next, state);
            state = next;
        }
        values[static_cast<std::size_t>(i)] = val;
    }

    EmpiricalSummary out;
    out.seed = seed;
    out.count = count;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(count - 1 > 0 ? count - 1 : 1);
    out.mean = mean;
    out.variance = var;

    for (double t : thresholds) {
        long long k = 0;
        for (double v : values)
            if (v >= t) ++k;
        const WilsonInterval wi = wilson95(k, count);
        out.tail_estimates.push_back(
            {t, static_cast<double>(k) / static_cast<double>(count), wi.lo, wi.hi});
    }

    const double mu = static_cast<double>(n) * [&] {
        const Vec pi = stationary(w);
        double acc = 0.0;
        for (int x = 0; x < dim; ++x)
            for (int xb = 0; xb < dim; ++xb)
                if (w.support(x, xb)) acc += w(x, xb) * pi[xb] * gen.g(x, xb);
        return acc;
    }();
    const double sigma = std::sqrt(static_cast<double>(n) * asymptotic_variance(w, gen));
    std::sort(values.begin(), values.end());
    double ks = 0.0;
    for (long long i = 0; i < count; ++i) {
        const double z = normal_cdf((values[static_cast<std::size_t>(i)] - mu) / sigma);
        const double lo = static_cast<double>(i) / static_cast<double>(count);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(count);
        ks = std::max(ks, std::max(std::fabs(hi - z), std::fabs(z - lo)));
    }
    out.ks_vs_gaussian = ks;
    return out;
}

void write_csv(const PathDistribution& dist, std::ostream& os) {
    os << (dist.has_second ? "value,prob_w0,prob_w1\n" : "value,prob_w0\n");
    os.precision(17);
    for (const PathAtom& a : dist.atoms) {
        os << a.value << ',' << a.p0;
        if (dist.has_second) os << ',' << a.p1;
        os << '\n';
    }
}

PathDistribution read_csv(std::istream& is) {
    PathDistribution out;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::BadInput, "empty csv");
    out.has_second = line.find("prob_w1") != std::string::npos;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        PathAtom a{0.0, 0.0, 0.0};
        char comma;
        ss >> a.value >> comma >> a.p0;
        if (out.has_second) ss >> comma >> a.p1;
        if (!ss) throw Error(ErrorCode::BadInput, "malformed csv row");
        out.atoms.push_back(a);
        out.total_w0 += a.p0;
    }
    return out;
}

}  // namespace mcb
