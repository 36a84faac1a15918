#include "afrelay/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace afrelay {

std::vector<double> SweepSpec::values() const {
    if (points < 1) throw std::invalid_argument("sweep needs at least one point");
    if (!(start <= stop)) throw std::invalid_argument("sweep must be ordered: start <= stop");
    if (log_spacing && !(start > 0.0)) {
        throw std::invalid_argument("log-spaced sweep needs positive endpoints");
    }
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        v.push_back(start);
        return v;
    }
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        if (log_spacing) {
            v.push_back(start * std::pow(stop / start, f));
        } else {
            v.push_back(start + f * (stop - start));
        }
    }
    return v;
}

SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4) {
        throw std::invalid_argument("sweep must be start:stop:points[:log], got '" + text + "'");
    }
    SweepSpec s;
    try {
        std::size_t used = 0;
        s.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
        s.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
        s.points = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep must be start:stop:points[:log], got '" + text + "'");
    }
    if (parts.size() == 4) {
        if (parts[3] != "log") {
            throw std::invalid_argument("sweep spacing must be 'log', got '" + parts[3] + "'");
        }
        s.log_spacing = true;
    }
    s.values();  // validates ranges eagerly
    return s;
}

SystemParams RunConfig::system_params() const {
    return SystemParams(p_s1, p_s2, r01, r02, omega_x, omega_y);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double v) { return 10.0 * std::log10(v); }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for '" + key + "': " + value);
    }
}

} // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: " + stripped);
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!seen.insert(key).second) {
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        }

        if (key == "ps1") cfg.p_s1 = parse_double(key, value);
        else if (key == "ps1_db") cfg.p_s1 = db_to_linear(parse_double(key, value));
        else if (key == "ps2") cfg.p_s2 = parse_double(key, value);
        else if (key == "ps2_db") cfg.p_s2 = db_to_linear(parse_double(key, value));
        else if (key == "r01") cfg.r01 = parse_double(key, value);
        else if (key == "r02") cfg.r02 = parse_double(key, value);
        else if (key == "omega_x") cfg.omega_x = parse_double(key, value);
        else if (key == "omega_x_db") cfg.omega_x = db_to_linear(parse_double(key, value));
        else if (key == "omega_y") cfg.omega_y = parse_double(key, value);
        else if (key == "omega_y_db") cfg.omega_y = db_to_linear(parse_double(key, value));
        else if (key == "pavg") cfg.p_avg = parse_double(key, value);
        else if (key == "pavg_db") cfg.p_avg = db_to_linear(parse_double(key, value));
        else if (key == "target_op") cfg.target_op = parse_double(key, value);
        else if (key == "samples") cfg.n_samples = parse_u64(key, value);
        else if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "sweep") cfg.sweep = parse_sweep(value);
        else if (key == "out") cfg.output_path = value;
        else if (key == "format") {
            if (value == "csv") cfg.format = OutputFormat::Csv;
            else if (value == "json") cfg.format = OutputFormat::Json;
            else throw std::invalid_argument("config: format must be csv or json, got '" + value + "'");
        } else if (key == "gnuplot") {
            if (value == "true" || value == "1") cfg.gnuplot = true;
            else if (value == "false" || value == "0") cfg.gnuplot = false;
            else throw std::invalid_argument("config: gnuplot must be true or false");
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }

    static const char* kDbPairs[][2] = {
        {"ps1", "ps1_db"},     {"ps2", "ps2_db"},         {"omega_x", "omega_x_db"},
        {"omega_y", "omega_y_db"}, {"pavg", "pavg_db"},
    };
    for (const auto& pair : kDbPairs) {
        if (seen.count(pair[0]) && seen.count(pair[1])) {
            throw std::invalid_argument(std::string("config: '") + pair[0] + "' and '" + pair[1] +
                                        "' are mutually exclusive");
        }
    }
}

} // namespace afrelay
