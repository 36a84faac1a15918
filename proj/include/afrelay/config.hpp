#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "afrelay/model.hpp"

namespace afrelay {

enum class Command { Scenario1, Scenario2, SolveRho, SolveMu, OutageCurve, Validate };
enum class OutputFormat { Csv, Json };

/// Evaluation grid: `points` values from start to stop, spaced linearly or
/// geometrically. Meaning of the values depends on the command (total
/// power in dB, outage targets, or cutoffs).
struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_spacing = false;

    std::vector<double> values() const;
};

/// Parses "start:stop:points" or "start:stop:points:log".
SweepSpec parse_sweep(const std::string& text);

struct RunConfig {
    Command command = Command::Validate;

    double p_s1 = 1.0;
    double p_s2 = 1.0;
    double r01 = 0.5;
    double r02 = 0.5;
    double omega_x = 1.0;
    double omega_y = 1.0;
    double p_avg = std::numeric_limits<double>::quiet_NaN();
    double target_op = std::numeric_limits<double>::quiet_NaN();

    std::optional<SweepSpec> sweep;
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string output_path;  // empty writes to stdout
    OutputFormat format = OutputFormat::Csv;
    bool gnuplot = false;

    /// Validation hook: multiplies the diagonal corner by this factor in
    /// the corner-identity check, so a value != 1 must make it fail.
    double lambda_scale = 1.0;

    SystemParams system_params() const;
};

/// Applies a flat key=value file ('#' comments, blank lines ignored) on
/// top of cfg. Power-like keys have *_db variants, mutually exclusive
/// with their linear form. Unknown keys and malformed values throw
/// std::invalid_argument.
void apply_config_file(RunConfig& cfg, const std::string& path);

double db_to_linear(double db);
double linear_to_db(double v);

} // namespace afrelay
