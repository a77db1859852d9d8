// Command-line surface: load a chain spec, run bounds / oracles / sampling,
// and emit machine-readable results.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcb/divergence.hpp"
#include "mcb/error.hpp"
#include "mcb/hypothesis.hpp"
#include "mcb/oracle.hpp"
#include "mcb/spec_io.hpp"
#include "mcb/tail_bounds.hpp"

using nlohmann::json;

namespace {

struct CommonArgs {
    std::string spec_path;
    bool as_json = false;
    double budget = 1e7;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("spec", args.spec_path, "chain spec JSON file")->required();
    cmd->add_flag("--json", args.as_json, "emit a JSON object instead of text");
    cmd->add_option("--budget", args.budget, "path-count cap for enumeration oracles");
}

std::ostream& full(std::ostream& os) { return os << std::setprecision(17); }

mcb::TailSide parse_side(const std::string& side) {
    if (side == "upper") return mcb::TailSide::UpperTail;
    if (side == "lower") return mcb::TailSide::LowerTail;
    throw mcb::Error(mcb::ErrorCode::BadInput, "--side must be upper or lower");
}

mcb::TiltedFamily family_of(const mcb::ChainSpec& spec) {
    if (!spec.gen) throw mcb::Error(mcb::ErrorCode::BadInput, "spec file has no generator");
    return mcb::TiltedFamily(spec.w, *spec.gen, spec.initial);
}

mcb::HTFamily ht_of(const mcb::ChainSpec& spec) {
    if (!spec.second) throw mcb::Error(mcb::ErrorCode::BadInput, "spec file has no second_chain");
    return mcb::HTFamily(spec.w, spec.initial, spec.second->w, spec.second->initial);
}

int run_inspect(const CommonArgs& args) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    const mcb::Classification cls = mcb::classify(spec.w);
    json out;
    out["dim"] = spec.w.dim();
    out["states"] = spec.states;
    out["irreducible"] = cls.irreducible;
    out["ergodic"] = cls.ergodic;
    out["period"] = cls.period;
    if (cls.ergodic) out["pi"] = mcb::stationary(spec.w);
    if (spec.gen && cls.ergodic) {
        mcb::TiltedFamily fam = family_of(spec);
        out["eta0"] = fam.eta(0.0);
        out["fisher0"] = fam.fisher(0.0);
        out["asymptotic_variance"] = mcb::asymptotic_variance(spec.w, *spec.gen);
        out["degenerate_generator"] = fam.degenerate();
    }
    if (args.as_json) {
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "dim: " << spec.w.dim() << "\nirreducible: " << (cls.irreducible ? "yes" : "no")
                    << "\nergodic: " << (cls.ergodic ? "yes" : "no") << "\nperiod: " << cls.period
                    << '\n';
    if (out.contains("pi")) {
        std::cout << "pi:";
        for (double p : out["pi"].get<std::vector<double>>()) full(std::cout) << ' ' << p;
        std::cout << '\n';
    }
    if (out.contains("eta0"))
        full(std::cout) << "eta(0): " << out["eta0"].get<double>()
                        << "\nphi''(0): " << out["fisher0"].get<double>()
                        << "\nasymptotic variance: " << out["asymptotic_variance"].get<double>()
                        << '\n';
    return 0;
}

int run_cgf(const CommonArgs& args, long long n, double theta) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    mcb::TiltedFamily fam = family_of(spec);
    const double exact = fam.cgf_exact(n, theta);
    const mcb::TiltedFamily::CgfBounds b = fam.cgf_bounds(n, theta);
    if (args.as_json) {
        json out{{"n", n}, {"theta", theta}, {"exact", exact}, {"lower", b.lower}, {"upper", b.upper}};
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "phi_n(theta) exact: " << exact << "\nlower: " << b.lower
                    << "\nupper: " << b.upper << '\n';
    return 0;
}

int run_tail(const CommonArgs& args, long long n, double a, const std::string& side_str,
             bool with_oracle) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    mcb::TiltedFamily fam = family_of(spec);
    const mcb::TailSide side = parse_side(side_str);
    std::optional<double> exact;
    if (with_oracle) {
        const mcb::PathDistribution dist =
            mcb::enumerate_paths(spec.w, spec.initial, *spec.gen, n, {}, args.budget);
        exact = -std::log(mcb::exact_tail(dist, a, side));
    }
    const mcb::TailBoundReport rep = mcb::tail_report(fam, n, a, side, exact);
    if (args.as_json) {
        json out{{"n", rep.n},
                 {"a", rep.a},
                 {"side", side_str},
                 {"lower", rep.lower_bound_on_neg_log},
                 {"upper", rep.upper_bound_on_neg_log},
                 {"s_opt", rep.optimizer.s},
                 {"theta_opt", rep.optimizer.theta},
                 {"feasible", rep.feasible}};
        if (rep.exact_neg_log) out["exact_neg_log"] = *rep.exact_neg_log;
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "lower bound on -log tail: " << rep.lower_bound_on_neg_log
                    << "\nupper bound on -log tail: " << rep.upper_bound_on_neg_log
                    << "\noptimizer: s = " << rep.optimizer.s << ", theta = " << rep.optimizer.theta
                    << "\nfeasible: " << (rep.feasible ? "yes" : "no") << '\n';
    if (rep.exact_neg_log) full(std::cout) << "-log exact tail: " << *rep.exact_neg_log << '\n';
    return 0;
}

int run_ht(const CommonArgs& args, long long n, std::optional<double> r_opt,
           std::optional<double> eps_opt, bool with_oracle) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    const mcb::HTFamily ht = ht_of(spec);
    if (!r_opt && !eps_opt) throw mcb::Error(mcb::ErrorCode::BadInput, "need --r or --eps");
    const double r = r_opt ? *r_opt : -std::log(*eps_opt) / static_cast<double>(n);
    std::optional<double> exact;
    if (with_oracle) {
        const double eps = std::exp(-static_cast<double>(n) * r);
        exact = -std::log(mcb::exact_beta(ht, n, eps, args.budget).beta);
    }
    const mcb::HTBoundReport rep = mcb::ht_report(ht, n, r, exact);
    if (args.as_json) {
        json out{{"n", rep.n},
                 {"r", rep.r},
                 {"epsilon", rep.epsilon},
                 {"lower_neg_log_beta", rep.lower_neg_log_beta},
                 {"upper_neg_log_beta", rep.upper_neg_log_beta},
                 {"s_opt", rep.optimizer.s},
                 {"theta_opt", rep.optimizer.theta},
                 {"feasible", rep.feasible}};
        if (rep.exact_neg_log_beta) out["exact_neg_log_beta"] = *rep.exact_neg_log_beta;
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "r: " << rep.r << " (epsilon = " << rep.epsilon << ")"
                    << "\nlower bound on -log beta: " << rep.lower_neg_log_beta
                    << "\nupper bound on -log beta: " << rep.upper_neg_log_beta
                    << "\noptimizer: s = " << rep.optimizer.s << ", theta = " << rep.optimizer.theta
                    << "\nfeasible: " << (rep.feasible ? "yes" : "no") << '\n';
    if (rep.exact_neg_log_beta) full(std::cout) << "-log exact beta: " << *rep.exact_neg_log_beta << '\n';
    return 0;
}

int run_variance(const CommonArgs& args) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    mcb::TiltedFamily fam = family_of(spec);
    const double formula = mcb::asymptotic_variance(spec.w, *spec.gen);
    const double fd = fam.fisher(0.0);
    if (args.as_json) {
        json out{{"formula", formula}, {"finite_difference", fd}, {"abs_diff", std::fabs(formula - fd)}};
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "fundamental-matrix formula: " << formula
                    << "\nfinite-difference phi''(0): " << fd
                    << "\nabs difference: " << std::fabs(formula - fd) << '\n';
    return 0;
}

int run_oracle(const CommonArgs& args, long long n, const std::string& out_path) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    if (!spec.gen) throw mcb::Error(mcb::ErrorCode::BadInput, "spec file has no generator");
    std::optional<mcb::SecondChain> second;
    if (spec.second) second = mcb::SecondChain{spec.second->w, spec.second->initial};
    const mcb::PathDistribution dist =
        mcb::enumerate_paths(spec.w, spec.initial, *spec.gen, n, second, args.budget);
    if (out_path.empty()) {
        mcb::write_csv(dist, std::cout);
    } else {
        std::ofstream f(out_path);
        mcb::write_csv(dist, f);
        full(std::cerr) << "atoms: " << dist.atoms.size() << ", total_w0: " << dist.total_w0 << '\n';
    }
    return 0;
}

int run_mc(const CommonArgs& args, long long n, long long count, std::uint64_t seed,
           const std::vector<double>& thresholds) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    if (!spec.gen) throw mcb::Error(mcb::ErrorCode::BadInput, "spec file has no generator");
    const mcb::EmpiricalSummary s =
        mcb::sample(spec.w, spec.initial, *spec.gen, n, count, seed, thresholds);
    if (args.as_json) {
        json out{{"seed", s.seed},          {"count", s.count}, {"mean", s.mean},
                 {"variance", s.variance},  {"ks_vs_gaussian", s.ks_vs_gaussian}};
        for (const auto& t : s.tail_estimates)
            out["tail_estimates"].push_back({{"threshold", t.threshold},
                                             {"frequency", t.frequency},
                                             {"wilson_lo", t.wilson_lo},
                                             {"wilson_hi", t.wilson_hi}});
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    full(std::cout) << "count: " << s.count << "\nmean: " << s.mean << "\nvariance: " << s.variance
                    << "\nks vs gaussian: " << s.ks_vs_gaussian << '\n';
    for (const auto& t : s.tail_estimates)
        full(std::cout) << "tail >= " << t.threshold << ": " << t.frequency << " [" << t.wilson_lo
                        << ", " << t.wilson_hi << "]\n";
    return 0;
}

int run_sweep(const CommonArgs& args, const std::string& mode, const std::string& grid,
              const std::vector<double>& values, std::optional<double> a_opt,
              const std::string& side_str, std::optional<double> r_opt, long long n_fixed,
              bool with_oracle) {
    const mcb::ChainSpec spec = mcb::load_spec_file(args.spec_path);
    std::cout << "n,r_or_a,lower,upper,exact_if_available,s_opt,theta_opt,feasible\n";
    std::ostringstream row;
    row << std::setprecision(17);
    if (mode == "tail") {
        mcb::TiltedFamily fam = family_of(spec);
        const mcb::TailSide side = parse_side(side_str);
        for (double v : values) {
            const long long n = grid == "n" ? static_cast<long long>(v) : n_fixed;
            const double a = grid == "n" ? (a_opt ? *a_opt : throw mcb::Error(mcb::ErrorCode::BadInput, "--a required"))
                                         : v;
            std::optional<double> exact;
            if (with_oracle) {
                try {
                    const mcb::PathDistribution dist =
                        mcb::enumerate_paths(spec.w, spec.initial, *spec.gen, n, {}, args.budget);
                    exact = -std::log(mcb::exact_tail(dist, a, side));
                } catch (const mcb::Error& e) {
                    if (e.code() != mcb::ErrorCode::BudgetExceeded) throw;
                }
            }
            const mcb::TailBoundReport rep = mcb::tail_report(fam, n, a, side, exact);
            row.str("");
            row << n << ',' << a << ',' << rep.lower_bound_on_neg_log << ','
                << rep.upper_bound_on_neg_log << ',';
            if (rep.exact_neg_log) row << *rep.exact_neg_log;
            row << ',' << rep.optimizer.s << ',' << rep.optimizer.theta << ','
                << (rep.feasible ? 1 : 0);
            std::cout << row.str() << '\n';
        }
        return 0;
    }
    if (mode == "ht") {
        const mcb::HTFamily ht = ht_of(spec);
        for (double v : values) {
            const long long n = grid == "n" ? static_cast<long long>(v) : n_fixed;
            const double r = grid == "n" ? (r_opt ? *r_opt : throw mcb::Error(mcb::ErrorCode::BadInput, "--r required"))
                                         : v;
            std::optional<double> exact;
            if (with_oracle) {
                try {
                    const double eps = std::exp(-static_cast<double>(n) * r);
                    exact = -std::log(mcb::exact_beta(ht, n, eps, args.budget).beta);
                } catch (const mcb::Error& e) {
                    if (e.code() != mcb::ErrorCode::BudgetExceeded) throw;
                }
            }
            const mcb::HTBoundReport rep = mcb::ht_report(ht, n, r, exact);
            row.str("");
            row << n << ',' << r << ',' << rep.lower_neg_log_beta << ',' << rep.upper_neg_log_beta
                << ',';
            if (rep.exact_neg_log_beta) row << *rep.exact_neg_log_beta;
            row << ',' << rep.optimizer.s << ',' << rep.optimizer.theta << ','
                << (rep.feasible ? 1 : 0);
            std::cout << row.str() << '\n';
        }
        return 0;
    }
    throw mcb::Error(mcb::ErrorCode::BadInput, "--mode must be tail or ht");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-length Markov chain bounds"};
    app.require_subcommand(1);

    CommonArgs inspect_args;
    CLI::App* inspect = app.add_subcommand("inspect", "classification, stationary distribution, variance");
    add_common(inspect, inspect_args);

    CommonArgs cgf_args;
    long long cgf_n = 1;
    double cgf_theta = 0.0;
    CLI::App* cgf = app.add_subcommand("cgf", "exact and bounded cumulant generating function");
    add_common(cgf, cgf_args);
    cgf->add_option("n", cgf_n, "number of transitions")->required();
    cgf->add_option("theta", cgf_theta, "natural parameter")->required();

    CommonArgs tail_args;
    long long tail_n = 1;
    double tail_a = 0.0;
    std::string tail_side = "upper";
    bool tail_oracle = false;
    CLI::App* tail = app.add_subcommand("tail", "finite-length tail probability bounds");
    add_common(tail, tail_args);
    tail->add_option("n", tail_n)->required();
    tail->add_option("a", tail_a, "per-step threshold")->required();
    tail->add_option("--side", tail_side, "upper|lower")->required();
    tail->add_flag("--with-oracle", tail_oracle, "also enumerate the exact tail");

    CommonArgs ht_args;
    long long ht_n = 1;
    std::optional<double> ht_r, ht_eps;
    bool ht_oracle = false;
    double ht_r_val = 0.0, ht_eps_val = 0.0;
    CLI::App* ht = app.add_subcommand("ht", "hypothesis-testing error bounds");
    add_common(ht, ht_args);
    ht->add_option("n", ht_n)->required();
    CLI::Option* ht_r_o = ht->add_option("--r", ht_r_val, "exponent constraint");
    CLI::Option* ht_eps_o = ht->add_option("--eps", ht_eps_val, "first-kind error level");
    ht->add_flag("--with-oracle", ht_oracle, "also run the exact optimal test");

    CommonArgs var_args;
    CLI::App* var = app.add_subcommand("variance", "asymptotic variance, formula vs finite difference");
    add_common(var, var_args);

    CommonArgs oracle_args;
    long long oracle_n = 1;
    std::string oracle_out;
    CLI::App* oracle = app.add_subcommand("oracle", "exact path enumeration to CSV");
    add_common(oracle, oracle_args);
    oracle->add_option("n", oracle_n)->required();
    oracle->add_option("--out", oracle_out, "CSV output file (default stdout)");

    CommonArgs mc_args;
    long long mc_n = 1, mc_count = 1;
    std::uint64_t mc_seed = 0;
    std::vector<double> mc_thresholds;
    CLI::App* mc = app.add_subcommand("mc", "seeded Monte Carlo sampling");
    add_common(mc, mc_args);
    mc->add_option("n", mc_n)->required();
    mc->add_option("count", mc_count)->required();
    mc->add_option("--seed", mc_seed, "64-bit unsigned seed")->required();
    mc->add_option("--threshold", mc_thresholds, "tail thresholds on gtilde^n");

    CommonArgs sweep_args;
    std::string sweep_mode = "tail", sweep_grid = "n", sweep_side = "upper";
    std::vector<double> sweep_values;
    double sweep_a_val = 0.0, sweep_r_val = 0.0;
    long long sweep_n_fixed = 1;
    bool sweep_oracle = false;
    CLI::App* sweep = app.add_subcommand("sweep", "CSV sweep over an n- or r-grid");
    add_common(sweep, sweep_args);
    sweep->add_option("--mode", sweep_mode, "tail|ht")->required();
    sweep->add_option("--grid", sweep_grid, "n | a (tail) | r (ht)")->required();
    sweep->add_option("--values", sweep_values, "grid values")->required();
    CLI::Option* sweep_a_o = sweep->add_option("--a", sweep_a_val, "tail threshold (tail mode)");
    sweep->add_option("--side", sweep_side, "upper|lower (tail mode)");
    CLI::Option* sweep_r_o = sweep->add_option("--r", sweep_r_val, "exponent (ht mode)");
    sweep->add_option("--n", sweep_n_fixed, "fixed n when sweeping a or r");
    sweep->add_flag("--with-oracle", sweep_oracle);

    try {
        app.parse(argc, argv);
        if (inspect->parsed()) return run_inspect(inspect_args);
        if (cgf->parsed()) return run_cgf(cgf_args, cgf_n, cgf_theta);
        if (tail->parsed()) return run_tail(tail_args, tail_n, tail_a, tail_side, tail_oracle);
        if (ht->parsed()) {
            if (ht_r_o->count()) ht_r = ht_r_val;
            if (ht_eps_o->count()) ht_eps = ht_eps_val;
            return run_ht(ht_args, ht_n, ht_r, ht_eps, ht_oracle);
        }
        if (var->parsed()) return run_variance(var_args);
        if (oracle->parsed()) return run_oracle(oracle_args, oracle_n, oracle_out);
        if (mc->parsed()) return run_mc(mc_args, mc_n, mc_count, mc_seed, mc_thresholds);
        if (sweep->parsed()) {
            std::optional<double> a_opt, r_opt;
            if (sweep_a_o->count()) a_opt = sweep_a_val;
            if (sweep_r_o->count()) r_opt = sweep_r_val;
            return run_sweep(sweep_args, sweep_mode, sweep_grid, sweep_values, a_opt, sweep_side,
                             r_opt, sweep_n_fixed, sweep_oracle);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const mcb::Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == mcb::ErrorCode::BudgetExceeded ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
