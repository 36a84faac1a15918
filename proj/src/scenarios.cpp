#include "afrelay/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "afrelay/analytic.hpp"
#include "afrelay/errors.hpp"
#include "afrelay/montecarlo.hpp"
#include "afrelay/numerics.hpp"
#include "afrelay/policies.hpp"

namespace afrelay {

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Beyond this cutoff the outage curve is flat at the floor to well below
// every tolerance in use; treat the budget as not binding instead of
// chasing an astronomically large root.
constexpr double kCutoffCap = 1e9;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

void add_common_metadata(std::vector<std::pair<std::string, std::string>>& meta,
                         const RunConfig& cfg) {
    meta.emplace_back("version", kVersion);
    meta.emplace_back("r01", fmt(cfg.r01));
    meta.emplace_back("r02", fmt(cfg.r02));
    meta.emplace_back("omega_x", fmt(cfg.omega_x));
    meta.emplace_back("omega_y", fmt(cfg.omega_y));
    meta.emplace_back("samples", std::to_string(cfg.n_samples));
    meta.emplace_back("seed", std::to_string(cfg.seed));
    meta.emplace_back("solve_rho_rel_tol", "1e-08");
    meta.emplace_back("solve_mu_abs_tol", "1e-10");
    meta.emplace_back("quadrature_rel_tol", "1e-09");
}

SweepSpec sweep_or_default(const RunConfig& cfg, const SweepSpec& fallback) {
    return cfg.sweep ? *cfg.sweep : fallback;
}

// Cutoff meeting the average-power budget, or kCutoffCap when the curve
// is already at its floor before exhausting the budget.
double effective_cutoff(const SystemParams& params, double p_avg) {
    if (avg_relay_power(params, kCutoffCap) <= p_avg) return kCutoffCap;
    return solve_rho(params, p_avg).cutoff;
}

} // namespace

std::string Table::to_csv() const {
    std::ostringstream out;
    for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out << ",";
        out << csv_escape(columns[c]);
    }
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << fmt(row[c]);
        }
        out << "\n";
    }
    return out.str();
}

std::string Table::to_json() const {
    nlohmann::json j;
    for (const auto& [k, v] : metadata) j["metadata"][k] = v;
    j["columns"] = columns;
    j["rows"] = rows;  // non-finite values render as null
    return j.dump(2) + "\n";
}

std::string Table::render(OutputFormat format) const {
    return format == OutputFormat::Csv ? to_csv() : to_json();
}

Table run_scenario1(const RunConfig& cfg) {
    const SweepSpec sweep = sweep_or_default(cfg, SweepSpec{0.0, 30.0, 16, false});
    const std::vector<double> pt_db_grid = sweep.values();

    Table t;
    t.columns = {"pt_db",       "p_node",       "rho",
                 "op_opa",      "op_opa_mc",    "op_opa_mc_se",
                 "opa_power_mc", "opa_power_mc_se",
                 "op_fpa",      "op_fpa_mc",    "op_fpa_mc_se",
                 "op_short_term_mc", "op_short_term_mc_se"};
    add_common_metadata(t.metadata, cfg);
    t.metadata.emplace_back("command", "scenario1");
    t.metadata.emplace_back("sweep", "pt_db");
    t.metadata.emplace_back("power_split", "p_s1=p_s2=p_avg=pt/3");

    for (const double pt_db : pt_db_grid) {
        const double pt = db_to_linear(pt_db);
        const double p_node = pt / 3.0;
        const SystemParams params(p_node, p_node, cfg.r01, cfg.r02, cfg.omega_x, cfg.omega_y);

        double rho = kNaN;
        double op_opa = kNaN;
        double op_fpa = kNaN;
        if (params.balanced) {
            rho = effective_cutoff(params, p_node);
            op_opa = outage_probability(params, rho);
            op_fpa = outage_probability(params, p_node);
        } else {
            try {
                rho = solve_rho_empirical(params, p_node, cfg.n_samples, cfg.seed).cutoff;
            } catch (const NumericalError&) {
                rho = std::numeric_limits<double>::infinity();  // serve every feasible state
            }
        }

        const EvalResult opa = evaluate_policy(params, RelayPolicy::opa(rho), cfg.n_samples, cfg.seed);
        const EvalResult fpa =
            evaluate_policy(params, RelayPolicy::fixed(p_node), cfg.n_samples, cfg.seed);
        const EvalResult st = evaluate_short_term_baseline(pt, cfg.r01, cfg.r02, cfg.omega_x,
                                                           cfg.omega_y, cfg.n_samples, cfg.seed);

        t.rows.push_back({pt_db, p_node, rho,
                          op_opa, opa.outage_estimate, opa.outage_stderr,
                          opa.avg_power_estimate, opa.avg_power_stderr,
                          op_fpa, fpa.outage_estimate, fpa.outage_stderr,
                          st.outage_estimate, st.outage_stderr});
    }
    return t;
}

namespace {

struct FixedPoint {
    double mu = kNaN;
    int iterations = 0;
};

// End-node powers equal the cutoff they induce; iterate until the two
// agree. A secant step on mu(ps) - ps cuts the iteration count far below
// the plain substitution, which converges only linearly near the fixed
// point.
FixedPoint scenario2_fixed_point(const RunConfig& cfg, double target) {
    double ps = 1.0;
    double prev_ps = kNaN;
    double prev_gap = kNaN;
    for (int it = 1; it <= 100; ++it) {
        const SystemParams params(ps, ps, cfg.r01, cfg.r02, cfg.omega_x, cfg.omega_y);
        if (target <= outage_floor(params)) {
            // Infeasible at the current powers only; the fixed point has
            // larger ones.
            ps *= 2.0;
            prev_ps = kNaN;
            continue;
        }
        const double mu = solve_mu(params, target).cutoff;
        if (std::abs(mu - ps) <= 1e-6 * mu) return {mu, it};
        const double gap = mu - ps;
        double next = mu;
        if (std::isfinite(prev_ps) && gap != prev_gap) {
            const double cand = ps - gap * (ps - prev_ps) / (gap - prev_gap);
            if (std::isfinite(cand) && cand > 0.0) next = cand;
        }
        prev_ps = ps;
        prev_gap = gap;
        ps = next;
    }
    std::ostringstream msg;
    msg << "scenario2: power/cutoff fixed point did not converge within 100 iterations "
        << "(target=" << target << ")";
    throw NumericalError(msg.str());
}

} // namespace

Table run_scenario2(const RunConfig& cfg) {
    if (snr_threshold(cfg.r01) != snr_threshold(cfg.r02)) {
        throw std::invalid_argument(
            "scenario2 ties both end-node powers to one cutoff, which needs r01 == r02");
    }
    const SweepSpec sweep = sweep_or_default(cfg, SweepSpec{0.05, 0.9, 18, false});
    const std::vector<double> targets = sweep.values();

    Table t;
    t.columns = {"target_op", "mu", "fixed_point_iterations", "avg_relay_power",
                 "relay_power_gain_db", "p2p_gain_db"};
    add_common_metadata(t.metadata, cfg);
    t.metadata.emplace_back("command", "scenario2");
    t.metadata.emplace_back("sweep", "target_op");
    t.metadata.emplace_back("end_node_powers", "p_s1=p_s2=mu via fixed point, |dmu|/mu<=1e-6");

    for (const double target : targets) {
        double mu = kNaN;
        double iters = kNaN;
        double avg = kNaN;
        double gain_db = kNaN;
        double p2p_db = kNaN;
        if (target > 0.0 && target < 1.0) {
            try {
                const FixedPoint fp = scenario2_fixed_point(cfg, target);
                const SystemParams params(fp.mu, fp.mu, cfg.r01, cfg.r02, cfg.omega_x,
                                          cfg.omega_y);
                mu = fp.mu;
                iters = fp.iterations;
                avg = avg_relay_power(params, fp.mu);
                gain_db = linear_to_db(fp.mu / avg);
                p2p_db = linear_to_db(p2p_truncation_gain(target));
            } catch (const NumericalError&) {
                // Row stays NaN; the rest of the sweep is unaffected.
            }
        }
        t.rows.push_back({target, mu, iters, avg, gain_db, p2p_db});
    }
    return t;
}

Table run_solve_rho(const RunConfig& cfg) {
    if (!(cfg.p_avg > 0.0)) {
        throw std::invalid_argument("solve-rho needs a positive --pavg");
    }
    const SystemParams params = cfg.system_params();

    Table t;
    t.columns = {"p_avg", "rho", "achieved_avg_power", "residual", "iterations"};
    add_common_metadata(t.metadata, cfg);
    t.metadata.emplace_back("command", "solve-rho");
    t.metadata.emplace_back("p_s1", fmt(cfg.p_s1));
    t.metadata.emplace_back("p_s2", fmt(cfg.p_s2));

    CutoffSolution sol;
    if (params.balanced) {
        t.metadata.emplace_back("method", "closed-form average power");
        sol = solve_rho(params, cfg.p_avg);
    } else {
        t.metadata.emplace_back("method", "empirical average power, common random numbers");
        sol = solve_rho_empirical(params, cfg.p_avg, cfg.n_samples, cfg.seed);
    }
    t.rows.push_back({cfg.p_avg, sol.cutoff, sol.achieved, sol.residual,
                      static_cast<double>(sol.iterations)});
    return t;
}

Table run_solve_mu(const RunConfig& cfg) {
    if (!(cfg.target_op > 0.0) || !(cfg.target_op < 1.0)) {
        throw std::invalid_argument("solve-mu needs --target-op in (0, 1)");
    }
    const SystemParams params = cfg.system_params();

    Table t;
    t.columns = {"target_op", "mu", "achieved_op", "residual", "iterations"};
    add_common_metadata(t.metadata, cfg);
    t.metadata.emplace_back("command", "solve-mu");
    t.metadata.emplace_back("p_s1", fmt(cfg.p_s1));
    t.metadata.emplace_back("p_s2", fmt(cfg.p_s2));

    const CutoffSolution sol = solve_mu(params, cfg.target_op);
    t.rows.push_back({cfg.target_op, sol.cutoff, sol.achieved, sol.residual,
                      static_cast<double>(sol.iterations)});
    return t;
}

Table run_outage_curve(const RunConfig& cfg) {
    const SweepSpec sweep = sweep_or_default(cfg, SweepSpec{0.5, 10.0, 20, false});
    const std::vector<double> rhos = sweep.values();
    const SystemParams params = cfg.system_params();

    Table t;
    t.columns = {"rho",   "op",    "avg_power",   "op_mc", "op_mc_se",
                 "power_mc", "power_mc_se"};
    add_common_metadata(t.metadata, cfg);
    t.metadata.emplace_back("command", "outage-curve");
    t.metadata.emplace_back("sweep", "rho");
    t.metadata.emplace_back("p_s1", fmt(cfg.p_s1));
    t.metadata.emplace_back("p_s2", fmt(cfg.p_s2));
    if (!params.balanced) {
        t.metadata.emplace_back("note", "unbalanced powers: closed-form columns not applicable");
    }

    for (const double rho : rhos) {
        double op = kNaN;
        double avg = kNaN;
        if (params.balanced) {
            op = outage_probability(params, rho);
            avg = avg_relay_power(params, rho);
        }
        const EvalResult mc = evaluate_policy(params, RelayPolicy::opa(rho), cfg.n_samples, cfg.seed);
        t.rows.push_back({rho, op, avg, mc.outage_estimate, mc.outage_stderr,
                          mc.avg_power_estimate, mc.avg_power_stderr});
    }
    return t;
}

bool ValidationReport::all_passed() const {
    for (const ValidationCheck& c : checks) {
        if (!c.skipped && !c.pass) return false;
    }
    return true;
}

std::string ValidationReport::to_csv() const {
    std::ostringstream out;
    for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
    out << "check,measured,reference,tolerance,status\n";
    for (const ValidationCheck& c : checks) {
        out << csv_escape(c.name) << "," << fmt(c.measured) << "," << fmt(c.reference) << ","
            << fmt(c.tolerance) << "," << (c.skipped ? "skipped" : (c.pass ? "pass" : "fail"))
            << "\n";
    }
    return out.str();
}

std::string ValidationReport::to_json() const {
    nlohmann::json j;
    for (const auto& [k, v] : metadata) j["metadata"][k] = v;
    j["checks"] = nlohmann::json::array();
    for (const ValidationCheck& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"measured", c.measured},
                               {"reference", c.reference},
                               {"tolerance", c.tolerance},
                               {"status", c.skipped ? "skipped" : (c.pass ? "pass" : "fail")}});
    }
    j["all_passed"] = all_passed();
    return j.dump(2) + "\n";
}

std::string ValidationReport::render(OutputFormat format) const {
    return format == OutputFormat::Csv ? to_csv() : to_json();
}

ValidationReport run_validate(const RunConfig& cfg) {
    const SystemParams params = cfg.system_params();
    ValidationReport rep;
    add_common_metadata(rep.metadata, cfg);
    rep.metadata.emplace_back("command", "validate");
    rep.metadata.emplace_back("p_s1", fmt(cfg.p_s1));
    rep.metadata.emplace_back("p_s2", fmt(cfg.p_s2));
    rep.metadata.emplace_back("balanced", params.balanced ? "true" : "false");
    if (cfg.lambda_scale != 1.0) {
        rep.metadata.emplace_back("lambda_scale", fmt(cfg.lambda_scale));
    }

    const std::vector<double> corner_grid = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0};
    const std::vector<double> mc_grid = {0.5, 1.0, 2.0, 5.0, 10.0};

    auto add = [&rep](const std::string& name, double measured, double reference, double tol,
                      bool pass) {
        rep.checks.push_back({name, measured, reference, tol, pass, false});
    };
    auto add_skipped = [&rep](const std::string& name) {
        rep.checks.push_back({name, kNaN, kNaN, kNaN, false, true});
    };

    if (params.balanced) {
        for (const double rho : corner_grid) {
            const double corner = lambda_cutoff(params, rho) * cfg.lambda_scale;
            const ShortTermPower st = min_short_term_power(params, {corner, corner});
            const double rel = st.feasible ? std::abs(st.power - rho) / rho : kNaN;
            add("corner_identity_rho_" + fmt(rho), rel, 0.0, 1e-9,
                st.feasible && rel <= 1e-9);
        }

        std::vector<double> analytic_op;
        std::vector<double> analytic_avg;
        for (const double rho : mc_grid) {
            const double op = outage_probability(params, rho);
            const double avg = avg_relay_power(params, rho);
            analytic_op.push_back(op);
            analytic_avg.push_back(avg);
            const EvalResult mc =
                evaluate_policy(params, RelayPolicy::opa(rho), cfg.n_samples, cfg.seed);
            add("mc_outage_rho_" + fmt(rho), mc.outage_estimate, op, 3.0 * mc.outage_stderr,
                std::abs(mc.outage_estimate - op) <= 3.0 * mc.outage_stderr);
            add("mc_avg_power_rho_" + fmt(rho), mc.avg_power_estimate, avg,
                3.0 * mc.avg_power_stderr,
                std::abs(mc.avg_power_estimate - avg) <= 3.0 * mc.avg_power_stderr);
        }

        bool op_decreasing = true;
        bool avg_increasing = true;
        for (std::size_t i = 1; i < mc_grid.size(); ++i) {
            op_decreasing = op_decreasing && analytic_op[i] < analytic_op[i - 1];
            avg_increasing = avg_increasing && analytic_avg[i] > analytic_avg[i - 1];
        }
        add("outage_strictly_decreasing", op_decreasing ? 1.0 : 0.0, 1.0, 0.0, op_decreasing);
        add("avg_power_strictly_increasing", avg_increasing ? 1.0 : 0.0, 1.0, 0.0, avg_increasing);

        const double target = outage_probability(params, 2.0);
        const double mu = solve_mu(params, target).cutoff;
        const double p = avg_relay_power(params, mu);
        const double rho_back = solve_rho(params, p).cutoff;
        add("duality_round_trip", rho_back, mu, 1e-6 * mu, std::abs(rho_back - mu) <= 1e-6 * mu);
    } else {
        for (const double rho : corner_grid) add_skipped("corner_identity_rho_" + fmt(rho));
        for (const double rho : mc_grid) {
            add_skipped("mc_outage_rho_" + fmt(rho));
            add_skipped("mc_avg_power_rho_" + fmt(rho));
        }
        add_skipped("outage_strictly_decreasing");
        add_skipped("avg_power_strictly_increasing");
        add_skipped("duality_round_trip");
    }

    {
        const EvalResult zero =
            evaluate_policy(params, RelayPolicy::zero(), std::min<std::uint64_t>(cfg.n_samples, 100'000),
                            cfg.seed);
        add("zero_policy_outage", zero.outage_estimate, 1.0, 0.0, zero.outage_estimate == 1.0);
    }
    {
        // A constant-power relay at rho and the truncated policy at cutoff
        // rho fail on exactly the same states.
        const double rho = 2.0;
        const ChannelSampler sampler(cfg.omega_x, cfg.omega_y, cfg.seed);
        const std::uint64_t n = std::min<std::uint64_t>(cfg.n_samples, 100'000);
        std::uint64_t mismatches = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const ChannelState s = sampler.at(i);
            const bool out_opa = is_outage(params, s, opa_power(params, s, rho));
            const bool out_fixed = is_outage(params, s, rho);
            if (out_opa != out_fixed) ++mismatches;
        }
        add("fixed_vs_opa_indicator_mismatches", static_cast<double>(mismatches), 0.0, 0.0,
            mismatches == 0);
    }
    {
        const double p_avg = std::isfinite(cfg.p_avg) ? cfg.p_avg : 0.1;
        try {
            const CutoffSolution sol =
                solve_rho_empirical(params, p_avg, std::min<std::uint64_t>(cfg.n_samples, 1'000'000),
                                    cfg.seed);
            add("empirical_cutoff_residual", sol.residual, 0.0, 0.01 * p_avg,
                sol.residual <= 0.01 * p_avg);
        } catch (const NumericalError&) {
            add("empirical_cutoff_residual", kNaN, 0.0, 0.01 * p_avg, false);
        }
    }

    return rep;
}

std::string gnuplot_script(const RunConfig& cfg, const Table& table, const std::string& csv_path) {
    std::ostringstream out;
    out << "set datafile separator ','\n";
    out << "set key outside\n";
    out << "set grid\n";

    auto col = [&table](const std::string& name) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (table.columns[i] == name) return i + 1;  // gnuplot columns are 1-based
        }
        throw std::logic_error("gnuplot_script: missing column " + name);
    };

    switch (cfg.command) {
        case Command::Scenario1:
            out << "set xlabel 'total power (dB)'\n";
            out << "set ylabel 'outage probability'\n";
            out << "set logscale y\n";
            out << "plot '" << csv_path << "' using 1:" << col("op_opa")
                << " with linespoints title 'truncated inversion', \\\n"
                << "     '" << csv_path << "' using 1:" << col("op_fpa")
                << " with linespoints title 'fixed power', \\\n"
                << "     '" << csv_path << "' using 1:" << col("op_short_term_mc")
                << " with linespoints title 'short-term split'\n";
            break;
        case Command::Scenario2:
            out << "set xlabel 'target outage probability'\n";
            out << "set ylabel 'power gain (dB)'\n";
            out << "plot '" << csv_path << "' using 1:" << col("relay_power_gain_db")
                << " with linespoints title 'relay power gain', \\\n"
                << "     '" << csv_path << "' using 1:" << col("p2p_gain_db")
                << " with linespoints title 'point-to-point reference'\n";
            break;
        case Command::OutageCurve:
            out << "set xlabel 'cutoff'\n";
            out << "set ylabel 'outage probability'\n";
            out << "set logscale y\n";
            out << "plot '" << csv_path << "' using 1:" << col("op")
                << " with lines title 'closed form', \\\n"
                << "     '" << csv_path << "' using 1:" << col("op_mc")
                << " with points title 'simulation'\n";
            break;
        default:
            throw std::invalid_argument("gnuplot output is only available for sweep commands");
    }
    return out.str();
}

} // namespace afrelay
