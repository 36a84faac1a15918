#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "afrelay/config.hpp"
#include "afrelay/errors.hpp"
#include "afrelay/scenarios.hpp"

namespace {

using namespace afrelay;

struct Flags {
    std::string config_path;
    std::string out;
    std::string format = "csv";
    std::string sweep;
    double ps1 = 1.0;
    double ps2 = 1.0;
    double r01 = 0.5;
    double r02 = 0.5;
    double omega_x = 1.0;
    double omega_y = 1.0;
    double pavg = 0.0;
    double target_op = 0.0;
    double lambda_scale = 1.0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    bool gnuplot = false;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_out = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_sweep = nullptr;
    CLI::Option* o_ps1 = nullptr;
    CLI::Option* o_ps2 = nullptr;
    CLI::Option* o_r01 = nullptr;
    CLI::Option* o_r02 = nullptr;
    CLI::Option* o_omega_x = nullptr;
    CLI::Option* o_omega_y = nullptr;
    CLI::Option* o_pavg = nullptr;
    CLI::Option* o_target_op = nullptr;
    CLI::Option* o_lambda_scale = nullptr;
    CLI::Option* o_samples = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_gnuplot = nullptr;
};

void add_flags(CLI::App* sub, Flags& f, bool with_lambda_scale) {
    f.o_config = sub->add_option("--config", f.config_path,
                                 "key=value file applied before the flags");
    f.o_out = sub->add_option("--out", f.out, "output path (default: stdout)");
    f.o_format = sub->add_option("--format", f.format, "csv or json")
                     ->check(CLI::IsMember({"csv", "json"}));
    f.o_seed = sub->add_option("--seed", f.seed, "sampler seed");
    f.o_samples = sub->add_option("--samples", f.samples, "Monte Carlo sample count");
    f.o_sweep = sub->add_option("--sweep", f.sweep, "grid as start:stop:points[:log]");
    f.o_ps1 = sub->add_option("--ps1", f.ps1, "S1 transmit power, linear");
    f.o_ps2 = sub->add_option("--ps2", f.ps2, "S2 transmit power, linear");
    f.o_r01 = sub->add_option("--r01", f.r01, "target rate of the S1 -> S2 session");
    f.o_r02 = sub->add_option("--r02", f.r02, "target rate of the S2 -> S1 session");
    f.o_omega_x = sub->add_option("--omega-x", f.omega_x, "mean of the S1-relay channel gain");
    f.o_omega_y = sub->add_option("--omega-y", f.omega_y, "mean of the S2-relay channel gain");
    f.o_pavg = sub->add_option("--pavg", f.pavg, "average relay power budget, linear");
    f.o_target_op = sub->add_option("--target-op", f.target_op, "outage probability target");
    f.o_gnuplot = sub->add_flag("--gnuplot", f.gnuplot,
                                "also write a plot script next to the CSV");
    if (with_lambda_scale) {
        f.o_lambda_scale =
            sub->add_option("--lambda-scale", f.lambda_scale)->group("");  // test hook, hidden
    }
}

RunConfig build_config(Command cmd, const Flags& f) {
    RunConfig cfg;
    cfg.command = cmd;
    if (f.o_config->count()) apply_config_file(cfg, f.config_path);
    if (f.o_ps1->count()) cfg.p_s1 = f.ps1;
    if (f.o_ps2->count()) cfg.p_s2 = f.ps2;
    if (f.o_r01->count()) cfg.r01 = f.r01;
    if (f.o_r02->count()) cfg.r02 = f.r02;
    if (f.o_omega_x->count()) cfg.omega_x = f.omega_x;
    if (f.o_omega_y->count()) cfg.omega_y = f.omega_y;
    if (f.o_pavg->count()) cfg.p_avg = f.pavg;
    if (f.o_target_op->count()) cfg.target_op = f.target_op;
    if (f.o_samples->count()) cfg.n_samples = f.samples;
    if (f.o_seed->count()) cfg.seed = f.seed;
    if (f.o_sweep->count()) cfg.sweep = parse_sweep(f.sweep);
    if (f.o_out->count()) cfg.output_path = f.out;
    if (f.o_format->count()) cfg.format = (f.format == "json") ? OutputFormat::Json : OutputFormat::Csv;
    if (f.o_gnuplot->count()) cfg.gnuplot = true;
    if (f.o_lambda_scale && f.o_lambda_scale->count()) cfg.lambda_scale = f.lambda_scale;

    if (cfg.gnuplot) {
        const bool sweep_command = cfg.command == Command::Scenario1 ||
                                   cfg.command == Command::Scenario2 ||
                                   cfg.command == Command::OutageCurve;
        if (!sweep_command) {
            throw std::invalid_argument("--gnuplot is only available for sweep commands");
        }
        if (cfg.output_path.empty()) {
            throw std::invalid_argument("--gnuplot needs --out to name the CSV it plots");
        }
        if (cfg.format != OutputFormat::Csv) {
            throw std::invalid_argument("--gnuplot plots the CSV output; use --format csv");
        }
    }
    return cfg;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output path: " + path);
    out << content;
    if (!out) throw std::invalid_argument("write failed: " + path);
}

int run(const RunConfig& cfg) {
    if (cfg.command == Command::Validate) {
        const ValidationReport rep = run_validate(cfg);
        write_output(cfg.output_path, rep.render(cfg.format));
        return rep.all_passed() ? 0 : 3;
    }

    Table table;
    switch (cfg.command) {
        case Command::Scenario1: table = run_scenario1(cfg); break;
        case Command::Scenario2: table = run_scenario2(cfg); break;
        case Command::SolveRho: table = run_solve_rho(cfg); break;
        case Command::SolveMu: table = run_solve_mu(cfg); break;
        case Command::OutageCurve: table = run_outage_curve(cfg); break;
        case Command::Validate: break;
    }
    write_output(cfg.output_path, table.render(cfg.format));
    if (cfg.gnuplot) {
        write_output(cfg.output_path + ".gp", gnuplot_script(cfg, table, cfg.output_path));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay power control for two-way amplify-and-forward relaying"};
    app.require_subcommand(1);

    struct Sub {
        Command command;
        CLI::App* app;
        Flags flags;
    };
    std::vector<Sub> subs;
    subs.push_back({Command::Scenario1,
                    app.add_subcommand("scenario1", "outage vs total power for three schemes"),
                    {}});
    subs.push_back({Command::Scenario2,
                    app.add_subcommand("scenario2", "relay power gain vs outage target"),
                    {}});
    subs.push_back({Command::SolveRho,
                    app.add_subcommand("solve-rho", "cutoff meeting an average-power budget"),
                    {}});
    subs.push_back({Command::SolveMu,
                    app.add_subcommand("solve-mu", "cutoff meeting an outage target"),
                    {}});
    subs.push_back({Command::OutageCurve,
                    app.add_subcommand("outage-curve", "outage and average power over a cutoff grid"),
                    {}});
    subs.push_back({Command::Validate,
                    app.add_subcommand("validate", "cross-check closed forms against simulation"),
                    {}});
    for (Sub& s : subs) add_flags(s.app, s.flags, s.command == Command::Validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const Sub& s : subs) {
            if (s.app->parsed()) return run(build_config(s.command, s.flags));
        }
        return 1;  // unreachable with require_subcommand(1)
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
