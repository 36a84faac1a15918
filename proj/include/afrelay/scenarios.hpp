#pragma once

#include <string>
#include <utility>
#include <vector>

#include "afrelay/config.hpp"

namespace afrelay {

/// Numeric result grid plus a metadata block. Rendering is fully
/// deterministic: 12 significant digits, no timestamps, NaN marks cells
/// that do not apply (JSON renders them as null).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    std::string to_csv() const;
    std::string to_json() const;
    std::string render(OutputFormat format) const;
};

/// Outage-vs-total-power comparison of the three schemes: truncated
/// inversion under an average-power budget of a third of the total,
/// constant relay power of the same third, and the per-realization
/// three-node split baseline. Sweep values are total power in dB.
Table run_scenario1(const RunConfig& cfg);

/// Relay power gain of cutoff-based inversion meeting an outage target
/// versus a constant-power relay meeting the same target, with end-node
/// powers tied to the cutoff by fixed-point iteration. Sweep values are
/// outage targets.
Table run_scenario2(const RunConfig& cfg);

Table run_solve_rho(const RunConfig& cfg);
Table run_solve_mu(const RunConfig& cfg);

/// Outage and average power of the truncated-inversion policy over a
/// cutoff sweep, closed-form beside Monte Carlo.
Table run_outage_curve(const RunConfig& cfg);

struct ValidationCheck {
    std::string name;
    double measured = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    std::vector<std::pair<std::string, std::string>> metadata;

    bool all_passed() const;  // skipped checks do not count as failures
    std::string to_csv() const;
    std::string to_json() const;
    std::string render(OutputFormat format) const;
};

/// Cross-checks the closed forms against the Monte Carlo evaluator and
/// re-runs the solver round trips. Unbalanced parameter sets run the
/// sampling-only subset, with the analytic checks marked skipped.
ValidationReport run_validate(const RunConfig& cfg);

/// Plot script for a rendered CSV; supported for the sweep-producing
/// commands (scenario1, scenario2, outage-curve).
std::string gnuplot_script(const RunConfig& cfg, const Table& table, const std::string& csv_path);

} // namespace afrelay
