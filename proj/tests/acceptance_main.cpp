// Acceptance gate: end-to-end checks of the library and CLI at their
// stated tolerances. Prints one line per criterion and exits nonzero if
// any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "afrelay/analytic.hpp"
#include "afrelay/config.hpp"
#include "afrelay/errors.hpp"
#include "afrelay/model.hpp"
#include "afrelay/montecarlo.hpp"
#include "afrelay/numerics.hpp"
#include "afrelay/policies.hpp"
#include "afrelay/scenarios.hpp"

using namespace afrelay;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int num, const char* label, bool ok, double elapsed, double budget,
            const std::string& detail) {
    const bool in_time = elapsed < budget;
    const bool pass = ok && in_time;
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%s; %.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", num,
                label, detail.c_str(), elapsed, budget);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

const SystemParams params_a(1.0, 1.0, 0.5, 0.5);

void criterion_1_corner_identity() {
    Timer t;
    double worst = 0.0;
    for (double rho : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
        const double corner = lambda_cutoff(params_a, rho);
        const ShortTermPower st = min_short_term_power(params_a, {corner, corner});
        const double rel = st.feasible ? std::abs(st.power - rho) / rho : 1.0;
        worst = std::max(worst, rel);
    }
    report(1, "corner of the served region needs exactly the cutoff power", worst <= 1e-9,
           t.seconds(), 1.0, "max rel err " + fmt(worst) + ", tol 1e-9");
}

void criterion_2_tightness() {
    Timer t;
    const ChannelSampler sampler(1.0, 1.0, 1001);
    const int want = 100'000;
    int found = 0;
    double worst_slack = 0.0;
    bool all_tight = true;
    bool all_reduce_fails = true;
    for (std::uint64_t i = 0; found < want; ++i) {
        const ChannelState s = sampler.at(i);
        const ShortTermPower st = min_short_term_power(params_a, s);
        if (!st.feasible) continue;
        ++found;
        const double slack = std::min(snr_at_s2(params_a, s, st.power) - params_a.delta1,
                                      snr_at_s1(params_a, s, st.power) - params_a.delta2);
        worst_slack = std::max(worst_slack, std::abs(slack));
        if (!(slack >= -1e-9 && slack <= 1e-9)) all_tight = false;
        if (!is_outage(params_a, s, st.power * (1.0 - 1e-6))) all_reduce_fails = false;
    }
    report(2, "minimum relay power is tight and necessary on 1e5 feasible states",
           all_tight && all_reduce_fails, t.seconds(), 5.0,
           "max |snr slack| " + fmt(worst_slack) + ", band 1e-9; 1e-6 power cut always fails");
}

struct OracleRun {
    double rho;
    double analytic_op;
    double analytic_avg;
    EvalResult mc;
};

std::vector<OracleRun> g_oracle_runs;
double g_oracle_elapsed = 0.0;

void criterion_3_outage_oracle() {
    Timer t;
    for (double rho : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        OracleRun run;
        run.rho = rho;
        run.analytic_op = outage_probability(params_a, rho);
        run.analytic_avg = avg_relay_power(params_a, rho);
        run.mc = evaluate_policy(params_a, RelayPolicy::opa(rho), 10'000'000, 7777);
        g_oracle_runs.push_back(run);
    }
    g_oracle_elapsed = t.seconds();
    double worst_sigma = 0.0;
    for (const OracleRun& run : g_oracle_runs) {
        worst_sigma = std::max(
            worst_sigma, std::abs(run.mc.outage_estimate - run.analytic_op) / run.mc.outage_stderr);
    }
    report(3, "outage closed form matches simulation at 1e7 samples", worst_sigma <= 3.0,
           g_oracle_elapsed, 120.0, "max |dev| " + fmt(worst_sigma) + " sigma, tol 3 sigma");
}

void criterion_4_avg_power_oracle() {
    double worst_sigma = 0.0;
    for (const OracleRun& run : g_oracle_runs) {
        worst_sigma =
            std::max(worst_sigma, std::abs(run.mc.avg_power_estimate - run.analytic_avg) /
                                      run.mc.avg_power_stderr);
    }
    report(4, "average-power closed form matches simulation at 1e7 samples", worst_sigma <= 3.0,
           g_oracle_elapsed, 120.0,
           "max |dev| " + fmt(worst_sigma) + " sigma, tol 3 sigma, shared sample runs");
}

void criterion_5_round_trips() {
    Timer t;
    double worst = 0.0;
    for (double rho0 : {0.5, 2.0, 10.0}) {
        const double v = avg_relay_power(params_a, rho0);
        const double rho_back = solve_rho(params_a, v).cutoff;
        worst = std::max(worst, std::abs(rho_back - rho0) / rho0);
        const double p = outage_probability(params_a, rho0);
        const double mu_back = solve_mu(params_a, p).cutoff;
        worst = std::max(worst, std::abs(mu_back - rho0) / rho0);
    }
    report(5, "both cutoff solvers invert their forward maps", worst <= 1e-6, t.seconds(), 30.0,
           "max rel err " + fmt(worst) + ", tol 1e-6");
}

void criterion_6_floor() {
    Timer t;
    const double floor = outage_floor(params_a);
    const double tail = outage_probability(params_a, 1e6);
    const bool ok_gap = tail - floor <= 1e-3;
    const bool ok_value = std::abs(floor - 0.864665) <= 1e-6;
    report(6, "outage approaches the weak-link floor", ok_gap && ok_value, t.seconds(), 5.0,
           "floor " + fmt(floor) + " vs 0.864665 tol 1e-6; gap at cutoff 1e6 " + fmt(tail - floor) +
               ", tol 1e-3");
}

void criterion_7_power_sweep() {
    Timer t;
    RunConfig cfg;
    cfg.command = Command::Scenario1;
    cfg.sweep = parse_sweep("0:30:16");
    cfg.n_samples = 1'000'000;
    cfg.seed = 4242;
    const Table table = run_scenario1(cfg);

    auto col = [&table](const char* name) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (table.columns[i] == name) return i;
        }
        return table.columns.size();
    };
    const std::size_t c_opa = col("op_opa_mc");
    const std::size_t c_opa_se = col("op_opa_mc_se");
    const std::size_t c_fpa = col("op_fpa_mc");
    const std::size_t c_fpa_se = col("op_fpa_mc_se");
    const std::size_t c_st = col("op_short_term_mc");
    const std::size_t c_st_se = col("op_short_term_mc_se");

    bool opa_never_worse = true;
    bool fpa_separated = true;
    bool st_low_half = true;
    double min_fpa_sigma = 1e300;
    double min_st_sigma = 1e300;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row[c_opa] > row[c_fpa]) opa_never_worse = false;
        const double se_f = std::sqrt(row[c_opa_se] * row[c_opa_se] +
                                      row[c_fpa_se] * row[c_fpa_se]);
        const double sep_f = (row[c_fpa] - row[c_opa]) / se_f;
        min_fpa_sigma = std::min(min_fpa_sigma, sep_f);
        if (sep_f < 3.0) fpa_separated = false;
        if (i < table.rows.size() / 2) {
            const double se_s = std::sqrt(row[c_opa_se] * row[c_opa_se] +
                                          row[c_st_se] * row[c_st_se]);
            const double sep_s = (row[c_st] - row[c_opa]) / se_s;
            min_st_sigma = std::min(min_st_sigma, sep_s);
            if (sep_s < 3.0) st_low_half = false;
        }
    }
    report(7, "outage vs total power: adaptive beats constant everywhere, per-state split on low half",
           opa_never_worse && fpa_separated && st_low_half, t.seconds(), 600.0,
           "min separation " + fmt(min_fpa_sigma) + " sigma vs constant, " + fmt(min_st_sigma) +
               " sigma vs split, tol 3 sigma");
}

void criterion_8_gain_sweep() {
    Timer t;
    RunConfig cfg;
    cfg.command = Command::Scenario2;
    const Table table = run_scenario2(cfg);

    auto col = [&table](const char* name) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (table.columns[i] == name) return i;
        }
        return table.columns.size();
    };
    const std::size_t c_target = col("target_op");
    const std::size_t c_gain = col("relay_power_gain_db");
    const std::size_t c_p2p = col("p2p_gain_db");

    bool mid_above_5db = true;
    bool shape_ok = true;
    double min_mid_gain = 1e300;
    double p2p_at_half = 0.0;
    std::size_t idx_half = 0;
    double best_half_dist = 1e300;
    std::vector<double> low_gains;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const double target = row[c_target];
        if (std::isnan(row[c_gain])) {
            shape_ok = false;
            continue;
        }
        if (target >= 0.3 - 1e-12 && target <= 0.7 + 1e-12) {
            min_mid_gain = std::min(min_mid_gain, row[c_gain]);
            if (row[c_gain] <= 5.0) mid_above_5db = false;
        }
        if (target <= 0.5 + 1e-12) low_gains.push_back(row[c_gain]);
        if (std::abs(target - 0.5) < best_half_dist) {
            best_half_dist = std::abs(target - 0.5);
            p2p_at_half = row[c_p2p];
            idx_half = i;
        }
    }
    (void)idx_half;
    // Decreasing-then-flat toward mid targets: no step may rise beyond a
    // flatness allowance, and the overall drop must be substantial.
    for (std::size_t i = 1; i < low_gains.size(); ++i) {
        if (low_gains[i] > low_gains[i - 1] + 0.15) shape_ok = false;
    }
    if (low_gains.size() < 2 ||
        low_gains.front() - *std::min_element(low_gains.begin(), low_gains.end()) < 1.0) {
        shape_ok = false;
    }

    const double c = 0.693147;
    const double ref_db = 10.0 * std::log10(1.0 / (c * exp_integral_e1(c)));
    const bool p2p_ok = std::abs(p2p_at_half - ref_db) <= 0.01;

    report(8, "power gain vs outage target: high at low targets, above 5 dB mid-range",
           mid_above_5db && shape_ok && p2p_ok, t.seconds(), 300.0,
           "min mid gain " + fmt(min_mid_gain) + " dB > 5 dB; point-to-point at 0.5 off by " +
               fmt(std::abs(p2p_at_half - ref_db)) + " dB, tol 0.01 dB");
}

void criterion_9_perturbed_policies() {
    Timer t;
    const std::uint64_t n = 1'000'000;
    const std::uint64_t seed = 31337;
    const double p_avg = 0.1;
    const ChannelSampler sampler(1.0, 1.0, seed);

    std::vector<double> required(n, -1.0);  // -1 marks infeasible states
    for (std::uint64_t i = 0; i < n; ++i) {
        const ShortTermPower st = min_short_term_power(params_a, sampler.at(i));
        if (st.feasible) required[i] = st.power;
    }
    const CutoffSolution sol = solve_rho_empirical(params_a, p_avg, n, seed);

    std::vector<std::uint32_t> served;
    std::vector<std::uint32_t> unserved_feasible;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (required[i] < 0.0) continue;
        if (required[i] <= sol.cutoff) served.push_back(static_cast<std::uint32_t>(i));
        else unserved_feasible.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint64_t opa_outages = n - served.size();
    const double opa_op = static_cast<double>(opa_outages) / static_cast<double>(n);
    const double sigma = std::sqrt(opa_op * (1.0 - opa_op) / static_cast<double>(n));

    // splitmix-style index stream for the perturbation draws
    auto draw = [](std::uint64_t s, std::uint64_t i, std::uint64_t mod) {
        std::uint64_t z = s + (i + 1) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return (z ^ (z >> 31)) % mod;
    };

    double worst_improvement_sigma = -1e300;
    bool none_better = true;
    for (int pert = 0; pert < 20; ++pert) {
        std::uint64_t outages = opa_outages;
        if (pert % 2 == 0) {
            // Silence some served states and respend the freed budget on
            // more expensive states; the last one is only part-funded.
            const int k = 200;
            double freed = 0.0;
            std::vector<bool> dropped(served.size(), false);
            for (int j = 0; j < k; ++j) {
                std::uint64_t idx = draw(1000 + pert, j, served.size());
                while (dropped[idx]) idx = (idx + 1) % served.size();
                dropped[idx] = true;
                freed += required[served[idx]];
            }
            outages += k;
            std::vector<bool> funded(unserved_feasible.size(), false);
            for (std::uint64_t j = 0; freed > 0.0 && j < unserved_feasible.size(); ++j) {
                std::uint64_t idx = draw(2000 + pert, j, unserved_feasible.size());
                while (funded[idx]) idx = (idx + 1) % unserved_feasible.size();
                funded[idx] = true;
                const double cost = required[unserved_feasible[idx]];
                if (cost <= freed) {
                    freed -= cost;
                    --outages;  // fully funded, leaves outage
                } else {
                    freed = 0.0;  // partial power, still in outage
                }
            }
        } else {
            // Overfund some served states at 1.5x and silence others to pay
            // for the excess.
            const int k = 400;
            double excess = 0.0;
            std::vector<bool> touched(served.size(), false);
            for (int j = 0; j < k; ++j) {
                std::uint64_t idx = draw(3000 + pert, j, served.size());
                while (touched[idx]) idx = (idx + 1) % served.size();
                touched[idx] = true;
                excess += 0.5 * required[served[idx]];
            }
            for (std::uint64_t j = 0; excess > 0.0; ++j) {
                if (j >= served.size()) break;
                std::uint64_t idx = draw(4000 + pert, j, served.size());
                while (touched[idx]) idx = (idx + 1) % served.size();
                touched[idx] = true;
                excess -= required[served[idx]];
                ++outages;  // dropped to pay the overfunding
            }
        }
        const double op = static_cast<double>(outages) / static_cast<double>(n);
        const double improvement_sigma = (opa_op - op) / sigma;
        worst_improvement_sigma = std::max(worst_improvement_sigma, improvement_sigma);
        if (improvement_sigma > 3.0) none_better = false;
    }
    report(9, "no equal-budget perturbation of the truncation policy lowers outage", none_better,
           t.seconds(), 300.0,
           "best perturbation improvement " + fmt(worst_improvement_sigma) +
               " sigma, tol 3 sigma");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion_10_cli_determinism() {
    Timer t;
    const std::string cli = AFRELAY_CLI_PATH;
    struct Case {
        const char* args;
        const char* out_a;
        const char* out_b;
    };
    const std::vector<Case> cases = {
        {"solve-rho --pavg 0.1", "acc_det_rho_a.csv", "acc_det_rho_b.csv"},
        {"solve-mu --target-op 0.95 --format json", "acc_det_mu_a.json", "acc_det_mu_b.json"},
        {"outage-curve --sweep 1:4:3 --samples 20000", "acc_det_curve_a.csv",
         "acc_det_curve_b.csv"},
    };
    bool ok = true;
    std::string detail = "byte-identical re-runs:";
    for (const Case& c : cases) {
        const std::string base = "\"" + cli + "\" " + c.args + " --out ";
        const int ra = std::system((base + c.out_a).c_str());
        const int rb = std::system((base + c.out_b).c_str());
        const std::string a = read_file(c.out_a);
        const std::string b = read_file(c.out_b);
        const bool same = ra == 0 && rb == 0 && !a.empty() && a == b;
        if (!same) ok = false;
        detail += std::string(" ") + c.args[0] + (same ? "+" : "-");
        std::remove(c.out_a);
        std::remove(c.out_b);
    }
    report(10, "CLI re-runs with identical config produce identical bytes", ok, t.seconds(), 60.0,
           detail);
}

} // namespace

int main() {
    std::printf("acceptance run: relay power control library and CLI\n");
    criterion_1_corner_identity();
    criterion_2_tightness();
    criterion_3_outage_oracle();
    criterion_4_avg_power_oracle();
    criterion_5_round_trips();
    criterion_6_floor();
    criterion_7_power_sweep();
    criterion_8_gain_sweep();
    criterion_9_perturbed_policies();
    criterion_10_cli_determinism();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
