#pragma once

// Configuration files, delimited tables, and structured records.
//
// Config format: keyed text with [circuit] / [grid] / [sweep] / [output]
// sections, one `key = value` pair per line, '#' comments. Keys carry their
// unit in the name (L_r_nH, I0_a_uA, ...) so files are self-describing;
// parsing converts to SI and serialization inverts the scaling losslessly.
//
// Tables: comma-separated, '.' decimal, one header row whose every column
// name ends in a unit tag, '#'-prefixed provenance lines (tool version and
// config hash, no timestamps — identical config and version give
// byte-identical files). A structured-record mirror of the same data can be
// written as JSON.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqc/bosonic.hpp"
#include "sqc/rateset.hpp"
#include "sqc/schrodinger.hpp"
#include "sqc/sweep.hpp"

namespace sqc::io {

inline constexpr const char* tool_name = "squidcoupler";
inline constexpr const char* tool_version = "0.1.0";

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

struct GridConfig {
    int n_points = 4096;
    bool operator==(const GridConfig&) const = default;
};

struct SweepConfig {
    SweepAxis axis = SweepAxis::flux_cpl;
    double start = -0.2;  // Phi_0
    double stop = 0.2;    // Phi_0
    int n_points = 33;
    bool freeze_zpf = false;
    int numeric_every = 8;
    // Two-photon resonance study: fractional atom junction-current offset for
    // the perturbed panel, and the flux_ext range searched to recover it.
    double atom_energy_perturbation = -0.02;
    double recovery_start = 0.699;  // Phi_0
    double recovery_stop = 0.719;   // Phi_0
    bool operator==(const SweepConfig&) const = default;
};

struct OutputConfig {
    std::string directory = ".";
    std::string format = "csv";  // "csv" or "record" (csv plus JSON mirror)
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    CircuitParameters circuit{};
    GridConfig grid;
    SweepConfig sweep;
    OutputConfig output;

    bool operator==(const RunConfig& o) const {
        const auto& a = circuit;
        const auto& b = o.circuit;
        return a.L_r == b.L_r && a.C_r == b.C_r && a.L_a == b.L_a &&
               a.C_a_total == b.C_a_total && a.I0_a == b.I0_a && a.I0_c == b.I0_c &&
               a.C_c_total == b.C_c_total && a.flux_ext == b.flux_ext &&
               a.flux_cpl == b.flux_cpl && grid == o.grid && sweep == o.sweep &&
               output == o.output;
    }
};

namespace detail {

// Scaled circuit keys: the config file stores value * 10^display_exp relative
// to the SI member (fF = 1e-15 F, so display_exp = 15).
struct CircuitKey {
    const char* name;
    double CircuitParameters::*member;
    int display_exp;
};

inline const std::vector<CircuitKey>& circuit_keys() {
    static const std::vector<CircuitKey> keys = {
        {"L_r_nH", &CircuitParameters::L_r, 9},
        {"C_r_fF", &CircuitParameters::C_r, 15},
        {"L_a_nH", &CircuitParameters::L_a, 9},
        {"C_a_total_fF", &CircuitParameters::C_a_total, 15},
        {"I0_a_uA", &CircuitParameters::I0_a, 6},
        {"I0_c_nA", &CircuitParameters::I0_c, 9},
        {"C_c_total_fF", &CircuitParameters::C_c_total, 15},
        {"flux_ext", &CircuitParameters::flux_ext, 0},
        {"flux_cpl", &CircuitParameters::flux_cpl, 0},
    };
    return keys;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Decimal value in display units -> SI double. The unit shift happens on the
// decimal exponent in text, so it is exact and one correctly rounded string
// conversion produces the member: serialize -> parse round trips bit for bit.
inline double parse_scaled(const std::string& where, const std::string& value,
                           int display_exp) {
    std::string mantissa = value;
    long exponent = 0;
    if (const auto epos = value.find_first_of("eE"); epos != std::string::npos) {
        mantissa = value.substr(0, epos);
        const std::string etail = value.substr(epos + 1);
        try {
            std::size_t used = 0;
            exponent = std::stol(etail, &used);
            if (used != etail.size() || etail.empty()) throw std::invalid_argument(etail);
        } catch (const std::exception&) {
            throw config_error(where + ": not a number: '" + value + "'");
        }
    }
    // Strictly digits with an optional sign and one decimal point (this also
    // rejects inf/nan/hex forms that stod would accept).
    int digits = 0, points = 0;
    for (std::size_t i = 0; i < mantissa.size(); ++i) {
        const char c = mantissa[i];
        if ((c == '+' || c == '-') && i == 0) continue;
        if (c == '.' && ++points == 1) continue;
        if (c >= '0' && c <= '9') {
            ++digits;
            continue;
        }
        throw config_error(where + ": not a number: '" + value + "'");
    }
    if (digits == 0 || points > 1)
        throw config_error(where + ": not a number: '" + value + "'");

    const std::string rebuilt =
        mantissa + "e" + std::to_string(exponent - display_exp);
    try {
        std::size_t used = 0;
        const double v = std::stod(rebuilt, &used);
        if (used != rebuilt.size()) throw std::invalid_argument(rebuilt);
        return v;
    } catch (const std::exception&) {
        throw config_error(where + ": value out of range: '" + value + "'");
    }
}

// SI double -> decimal text in display units, shortest digit string that
// parses back to the identical double.
inline std::string format_scaled(double si, int display_exp) {
    if (si == 0.0) return std::signbit(si) ? "-0" : "0";
    std::string fallback;
    for (int prec = 15; prec <= 17; ++prec) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*e", prec - 1, si);
        std::string s(buf);
        const auto epos = s.find('e');
        std::string mantissa = s.substr(0, epos);
        const long exponent = std::stol(s.substr(epos + 1)) + display_exp;
        if (mantissa.find('.') != std::string::npos) {
            while (mantissa.back() == '0') mantissa.pop_back();
            if (mantissa.back() == '.') mantissa.pop_back();
        }
        std::string out = mantissa;
        if (exponent != 0) out += "e" + std::to_string(exponent);
        if (parse_scaled("format_scaled", out, display_exp) == si) return out;
        fallback = out;
    }
    return fallback;  // unreachable: 17 significant digits always round-trip
}

inline int parse_int(const std::string& where, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error(where + ": not an integer: '" + value + "'");
    }
}

inline bool parse_bool(const std::string& where, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw config_error(where + ": expected true or false, got '" + value + "'");
}

}  // namespace detail

inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[circuit]\n";
    for (const auto& k : detail::circuit_keys())
        out << k.name << " = "
            << detail::format_scaled(cfg.circuit.*(k.member), k.display_exp) << "\n";
    out << "\n[grid]\n";
    out << "n_points = " << cfg.grid.n_points << "\n";
    out << "\n[sweep]\n";
    out << "axis = " << axis_name(cfg.sweep.axis) << "\n";
    out << "start = " << detail::format_scaled(cfg.sweep.start, 0) << "\n";
    out << "stop = " << detail::format_scaled(cfg.sweep.stop, 0) << "\n";
    out << "n_points = " << cfg.sweep.n_points << "\n";
    out << "freeze_zpf = " << (cfg.sweep.freeze_zpf ? "true" : "false") << "\n";
    out << "numeric_every = " << cfg.sweep.numeric_every << "\n";
    out << "atom_energy_perturbation = "
        << detail::format_scaled(cfg.sweep.atom_energy_perturbation, 0) << "\n";
    out << "recovery_start = " << detail::format_scaled(cfg.sweep.recovery_start, 0)
        << "\n";
    out << "recovery_stop = " << detail::format_scaled(cfg.sweep.recovery_stop, 0)
        << "\n";
    out << "\n[output]\n";
    out << "directory = " << cfg.output.directory << "\n";
    out << "format = " << cfg.output.format << "\n";
    return out.str();
}

inline RunConfig parse_config_text(const std::string& text, const std::string& source) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::string section;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(where + ": unterminated section header '" + line + "'");
            section = line.substr(1, line.size() - 2);
            if (section != "circuit" && section != "grid" && section != "sweep" &&
                section != "output")
                throw config_error(where + ": unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw config_error(where + ": empty key");
        if (value.empty()) throw config_error(where + ": key '" + key + "' has no value");
        if (section.empty())
            throw config_error(where + ": key '" + key + "' appears before any section");
        if (!seen.insert(section + "." + key).second)
            throw config_error(where + ": duplicate key '" + key + "' in [" + section + "]");
        const std::string ctx = where + ": [" + section + "] " + key;

        if (section == "circuit") {
            bool known = false;
            for (const auto& k : detail::circuit_keys())
                if (key == k.name) {
                    cfg.circuit.*(k.member) = detail::parse_scaled(ctx, value, k.display_exp);
                    known = true;
                    break;
                }
            if (!known)
                throw config_error(where + ": unknown key '" + key + "' in [circuit]");
        } else if (section == "grid") {
            if (key == "n_points")
                cfg.grid.n_points = detail::parse_int(ctx, value);
            else
                throw config_error(where + ": unknown key '" + key + "' in [grid]");
        } else if (section == "sweep") {
            if (key == "axis") {
                if (value == "flux_cpl")
                    cfg.sweep.axis = SweepAxis::flux_cpl;
                else if (value == "flux_ext")
                    cfg.sweep.axis = SweepAxis::flux_ext;
                else
                    throw config_error(ctx + ": expected flux_cpl or flux_ext, got '" +
                                       value + "'");
            } else if (key == "start")
                cfg.sweep.start = detail::parse_scaled(ctx, value, 0);
            else if (key == "stop")
                cfg.sweep.stop = detail::parse_scaled(ctx, value, 0);
            else if (key == "n_points")
                cfg.sweep.n_points = detail::parse_int(ctx, value);
            else if (key == "freeze_zpf")
                cfg.sweep.freeze_zpf = detail::parse_bool(ctx, value);
            else if (key == "numeric_every")
                cfg.sweep.numeric_every = detail::parse_int(ctx, value);
            else if (key == "atom_energy_perturbation")
                cfg.sweep.atom_energy_perturbation = detail::parse_scaled(ctx, value, 0);
            else if (key == "recovery_start")
                cfg.sweep.recovery_start = detail::parse_scaled(ctx, value, 0);
            else if (key == "recovery_stop")
                cfg.sweep.recovery_stop = detail::parse_scaled(ctx, value, 0);
            else
                throw config_error(where + ": unknown key '" + key + "' in [sweep]");
        } else {  // output
            if (key == "directory")
                cfg.output.directory = value;
            else if (key == "format")
                cfg.output.format = value;
            else
                throw config_error(where + ": unknown key '" + key + "' in [output]");
        }
    }

    // All circuit keys are required; everything else has defaults.
    std::string missing;
    for (const auto& k : detail::circuit_keys())
        if (!seen.count(std::string("circuit.") + k.name))
            missing += missing.empty() ? k.name : std::string(", ") + k.name;
    if (!missing.empty())
        throw config_error(source + ": missing required [circuit] keys: " + missing);

    try {
        cfg.circuit.validate();
    } catch (const sqc::error& e) {
        throw config_error(source + ": " + e.what());
    }
    if (cfg.grid.n_points < 512)
        throw config_error(source + ": [grid] n_points must be at least 512");
    if (!(cfg.sweep.start < cfg.sweep.stop))
        throw config_error(source + ": [sweep] start must be below stop");
    if (cfg.sweep.n_points < 2)
        throw config_error(source + ": [sweep] n_points must be at least 2");
    if (cfg.sweep.numeric_every < 0)
        throw config_error(source + ": [sweep] numeric_every must be non-negative");
    if (!(std::abs(cfg.sweep.atom_energy_perturbation) < 0.05))
        throw config_error(source +
                           ": [sweep] atom_energy_perturbation must stay below 0.05");
    if (!(cfg.sweep.recovery_start < cfg.sweep.recovery_stop))
        throw config_error(source + ": [sweep] recovery_start must be below recovery_stop");
    if (cfg.output.format != "csv" && cfg.output.format != "record")
        throw config_error(source + ": [output] format must be csv or record, got '" +
                           cfg.output.format + "'");
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

// FNV-1a over the canonical serialization: stable across runs and platforms.
inline std::string config_hash(const RunConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

// Unit discipline: every column name must end in a unit tag. Dimensionless
// numeric columns are tagged _1, booleans _flag, indices _idx, text _label.
inline const std::set<std::string>& unit_tags() {
    static const std::set<std::string> tags = {"GHz", "MHz", "Phi0", "rad",
                                               "1",   "flag", "idx", "label"};
    return tags;
}

inline void validate_schema(const Table& t) {
    if (t.columns.empty()) throw invalid_parameters_error("table has no columns");
    for (const auto& name : t.columns) {
        const auto us = name.rfind('_');
        if (us == std::string::npos || !unit_tags().count(name.substr(us + 1)))
            throw invalid_parameters_error("column '" + name + "' carries no unit tag");
    }
    for (const auto& row : t.rows)
        if (row.size() != t.columns.size())
            throw invalid_parameters_error("table row width does not match header");
}

inline std::string cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "1" : "0"; }

// Provenance header lines (without the leading '# '): tool version, command,
// config hash, any command flags, then the full effective config so defaults
// are echoed back.
inline std::vector<std::string> provenance_lines(const RunConfig& cfg,
                                                 const std::string& command,
                                                 const std::vector<std::string>& extra = {}) {
    std::vector<std::string> lines;
    lines.push_back(std::string("tool: ") + tool_name + " " + tool_version);
    lines.push_back("command: " + command);
    lines.push_back("config_hash: " + config_hash(cfg));
    for (const auto& e : extra) lines.push_back(e);
    std::istringstream cfg_text(serialize_config(cfg));
    std::string section, line;
    while (std::getline(cfg_text, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        lines.push_back("config: " + section + "." + line);
    }
    return lines;
}

inline void write_csv(const std::filesystem::path& path, const Table& table,
                      const std::vector<std::string>& provenance) {
    validate_schema(table);
    std::ofstream out(path);
    if (!out) throw config_error("cannot write file: " + path.string());
    for (const auto& line : provenance) out << "# " << line << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "\n");
    for (const auto& row : table.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
}

// Structured-record mirror of the same table (keys sorted by nlohmann::json,
// so serialization is deterministic).
inline nlohmann::json table_record(const Table& table,
                                   const std::vector<std::string>& provenance) {
    validate_schema(table);
    nlohmann::json j;
    j["provenance"] = provenance;
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    return j;
}

inline void write_record(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Table builders
// ---------------------------------------------------------------------------

// Single-bias scalar report: one wide row, every pipeline output of interest.
inline Table rates_table(const RateSet& rs) {
    Table t;
    t.columns = {
        "flux_cpl_Phi0",     "flux_ext_Phi0",      "phi_r_min_rad",
        "phi_a_min_rad",     "delta_rad",          "omega_r_tilde_GHz",
        "omega_a_tilde_GHz", "omega_r_tilde_design_GHz", "detuning_MHz",
        "detuning_design_MHz", "g1c_MHz",          "g1i_MHz",
        "g1i_tilde_MHz",     "g_minus_MHz",        "g_plus_MHz",
        "g2_MHz",            "g2_tilde_MHz",       "g3_MHz",
        "G2_MHz",            "G3_MHz",             "J_MHz",
        "F_MHz",             "K0_MHz",             "K0X_MHz",
        "K_tilde_MHz",       "Xi_a_MHz",           "Xi_r_MHz",
        "mu_1",              "lambda_a_1",         "freeze_zpf_flag",
    };
    t.rows.push_back({
        cell(rs.params.flux_cpl), cell(rs.params.flux_ext), cell(rs.eq.phi_r_min),
        cell(rs.eq.phi_a_min), cell(rs.eq.delta), cell(rs.freqs.omega_r_tilde),
        cell(rs.freqs.omega_a_tilde), cell(rs.omega_r_tilde_design), cell(rs.detuning),
        cell(rs.detuning_design), cell(rs.bare.g1c), cell(rs.bare.g1i),
        cell(rs.renorm.g1i_tilde), cell(rs.renorm.g_minus), cell(rs.renorm.g_plus),
        cell(rs.bare.g2), cell(rs.renorm.g2_tilde), cell(rs.bare.g3),
        cell(rs.bare.G2), cell(rs.bare.G3), cell(rs.renorm.J),
        cell(rs.renorm.F), cell(rs.bare.K0), cell(rs.renorm.K0X),
        cell(rs.renorm.K_tilde), cell(rs.anh.Xi_a), cell(rs.anh.Xi_r),
        cell(rs.mu.mu), cell(rs.mu.lambda_a), cell(rs.frozen),
    });
    return t;
}

// Aligned human-readable scalar report for the terminal.
inline std::string rates_pretty(const RateSet& rs) {
    std::ostringstream out;
    auto line = [&](const char* name, double v, const char* unit) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-24s %14.6f  %s\n", name, v, unit);
        out << buf;
    };
    out << "bias point\n";
    line("flux_cpl", rs.params.flux_cpl, "Phi_0");
    line("flux_ext", rs.params.flux_ext, "Phi_0");
    line("phi_r_min", rs.eq.phi_r_min, "rad");
    line("phi_a_min", rs.eq.phi_a_min, "rad");
    line("delta", rs.eq.delta, "rad");
    out << "frequencies\n";
    line("omega_r_tilde", rs.freqs.omega_r_tilde, "GHz");
    line("omega_a_tilde", rs.freqs.omega_a_tilde, "GHz");
    line("omega_r_tilde_design", rs.omega_r_tilde_design, "GHz");
    line("detuning", rs.detuning, "MHz");
    line("detuning_design", rs.detuning_design, "MHz");
    out << "bare rates\n";
    line("g1c", rs.bare.g1c, "MHz");
    line("g1i", rs.bare.g1i, "MHz");
    line("g2", rs.bare.g2, "MHz");
    line("g3", rs.bare.g3, "MHz");
    line("G2", rs.bare.G2, "MHz");
    line("G3", rs.bare.G3, "MHz");
    line("K0", rs.bare.K0, "MHz");
    out << "renormalized rates\n";
    line("g1i_tilde", rs.renorm.g1i_tilde, "MHz");
    line("g_minus", rs.renorm.g_minus, "MHz");
    line("g_plus", rs.renorm.g_plus, "MHz");
    line("g2_tilde", rs.renorm.g2_tilde, "MHz");
    line("J", rs.renorm.J, "MHz");
    line("F", rs.renorm.F, "MHz");
    line("K0X", rs.renorm.K0X, "MHz");
    line("K_tilde", rs.renorm.K_tilde, "MHz");
    line("Xi_a", rs.anh.Xi_a, "MHz");
    line("Xi_r", rs.anh.Xi_r, "MHz");
    line("mu", rs.mu.mu, "1");
    line("lambda_a", rs.mu.lambda_a, "1");
    out << "zero-point profile " << (rs.frozen ? "(frozen)" : "(live)") << "\n";
    line("resonator n_zpf", rs.profiles.first.n_zpf, "1");
    line("resonator phi_zpf", rs.profiles.first.phi_zpf, "1");
    line("atom n_zpf", rs.profiles.second.n_zpf, "1");
    line("atom phi_zpf", rs.profiles.second.phi_zpf, "1");
    if (!rs.small.warnings.empty()) {
        out << "warnings\n";
        for (const auto& w : rs.small.warnings) out << "  " << w << "\n";
    }
    return out.str();
}

// Coupler-flux sweep of the rate pipeline (the standard figure columns).
// Failed points keep their flux and error message; numeric cells stay empty.
inline Table sweep_table(const SweepResult& result) {
    Table t;
    const std::string axis_col = axis_name(result.spec.axis) + "_Phi0";
    t.columns = {axis_col,   "g1c_MHz", "g1i_MHz",      "g1i_tilde_MHz",
                 "g_minus_MHz", "K0_MHz",  "K0X_MHz",      "K_tilde_MHz",
                 "g2_MHz",      "g2_tilde_MHz", "J_MHz",   "G2_MHz",
                 "error_label"};
    for (const auto& row : result.rows) {
        std::vector<std::string> r(t.columns.size());
        r[0] = cell(row.flux);
        if (row.rates) {
            const auto& rs = *row.rates;
            r[1] = cell(rs.bare.g1c);
            r[2] = cell(rs.bare.g1i);
            r[3] = cell(rs.renorm.g1i_tilde);
            r[4] = cell(rs.renorm.g_minus);
            r[5] = cell(rs.bare.K0);
            r[6] = cell(rs.renorm.K0X);
            r[7] = cell(rs.renorm.K_tilde);
            r[8] = cell(rs.bare.g2);
            r[9] = cell(rs.renorm.g2_tilde);
            r[10] = cell(rs.renorm.J);
            r[11] = cell(rs.bare.G2);
        }
        r[12] = row.error;
        t.rows.push_back(std::move(r));
    }
    return t;
}

// Two-photon resonance panel: numerical atom frequency against twice the
// designed resonator frequency, with the in-window criterion per row.
inline Table resonance_table(const SweepResult& result) {
    Table t;
    t.columns = {axis_name(result.spec.axis) + "_Phi0",
                 "omega_a_num_GHz",
                 "two_omega_r_GHz",
                 "g2_tilde_MHz",
                 "in_resonance_flag",
                 "error_label"};
    for (const auto& row : result.rows) {
        std::vector<std::string> r(t.columns.size());
        r[0] = cell(row.flux);
        if (row.rates) {
            if (row.omega_a_num) r[1] = cell(*row.omega_a_num);
            r[2] = cell(2.0 * row.rates->omega_r_tilde_design);
            r[3] = cell(row.rates->renorm.g2_tilde);
            r[4] = cell(row_in_resonance(row));
        }
        r[5] = row.error;
        t.rows.push_back(std::move(r));
    }
    return t;
}

// Zeros, extrema, and resonance windows in one long-format sidecar.
inline Table features_table(const FeatureSet& features,
                            const std::string& window_quantity = "resonance") {
    Table t;
    t.columns = {"kind_label", "quantity_label", "flux_lo_Phi0", "flux_hi_Phi0",
                 "value_MHz"};
    for (const auto& z : features.zeros)
        t.rows.push_back({"zero", z.quantity, cell(z.flux), cell(z.flux), ""});
    for (const auto& e : features.extrema)
        t.rows.push_back({"extremum", e.quantity, cell(e.flux), cell(e.flux),
                          cell(e.value)});
    for (const auto& w : features.resonance_windows)
        t.rows.push_back({"window", window_quantity, cell(w.flux_lo), cell(w.flux_hi),
                          ""});
    return t;
}

// Metastable-well level table with the perturbative ladder joined against the
// numerically classified states. `perturbative` holds absolute energies in
// well order. With `classified` false (single-well potential: no barrier, so
// no left-weight or metastable flag), the ladder pairs with the lowest states
// instead and the classification cells stay empty.
inline Table levels_table(const std::vector<MetastableLevel>& levels,
                          const std::vector<double>& perturbative,
                          bool classified = true) {
    Table t;
    t.columns = {"index_idx", "energy_GHz", "left_weight_1", "metastable_flag",
                 "perturbative_energy_GHz"};
    std::size_t meta_seen = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        std::vector<std::string> r(t.columns.size());
        r[0] = cell(static_cast<int>(i));
        r[1] = cell(levels[i].energy);
        if (classified) {
            r[2] = cell(levels[i].left_weight);
            r[3] = cell(levels[i].metastable);
            if (levels[i].metastable && meta_seen < perturbative.size())
                r[4] = cell(perturbative[meta_seen++]);
        } else if (i < perturbative.size()) {
            r[4] = cell(perturbative[i]);
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

// Plot-ready potential samples.
inline Table potential_table(const PotentialSpec& pot, const Grid& grid, int stride) {
    if (stride < 1) throw invalid_parameters_error("potential table stride must be >= 1");
    Table t;
    t.columns = {"phi_rad", "potential_GHz"};
    for (int j = 0; j < grid.n_points; j += stride) {
        const double phi = grid.point(j);
        t.rows.push_back({cell(phi), cell(pot.U(phi))});
    }
    return t;
}

// Operator-identity verification results.
inline Table verify_table(const std::vector<alg::VerificationReport>& reports) {
    Table t;
    t.columns = {"name_label", "expected_label", "outcome_label", "difference_label"};
    for (const auto& r : reports)
        t.rows.push_back({r.name, r.expect_pass ? "pass" : "fail",
                          r.pass ? "pass" : "fail", r.difference});
    return t;
}

}  // namespace sqc::io
