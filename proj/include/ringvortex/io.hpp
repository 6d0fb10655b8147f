#pragma once

// Run configuration, orchestration, and bit-stable serialization of profiles
// and reports.
//
// Config files are line-oriented `key = value` text with `#` comments.
// Reports are a single structured-text document (key/value plus indexed
// arrays) chosen for line diffability; profile data goes to a separate CSV
// with header `r,u` and 17 significant digits. Identical configs produce
// byte-identical outputs; nothing time- or environment-dependent enters the
// report body.

#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ringvortex/constrained_minimizer.hpp"
#include "ringvortex/mountain_pass.hpp"
#include "ringvortex/potentials.hpp"
#include "ringvortex/radial_core.hpp"
#include "ringvortex/theorem_checks.hpp"

namespace ringvortex {

inline constexpr const char* tool_version = "ringvortex 0.1.0";

// Exit codes of run(): 0 converged/ok, 1 usage or config error (raised by the
// CLI), 2 solver non-convergence, 3 bound-verdict failure.
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_no_convergence = 2;
inline constexpr int exit_bound_failure = 3;

enum class RunMode { minimize, mountainpass, check, sweep };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::minimize: return "minimize";
        case RunMode::mountainpass: return "mountainpass";
        case RunMode::check: return "check";
        case RunMode::sweep: return "sweep";
    }
    return "?";
}

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
    ConfigError(std::size_t line, const std::string& msg)
        : std::runtime_error("config:" + std::to_string(line) + ": " + msg) {}
};

struct SweepSpec {
    std::string param;  // one of n, P0, R, beta
    double from = 0.0;
    double to = 0.0;
    std::size_t count = 0;
};

struct RunConfig {
    RunMode mode = RunMode::minimize;
    double R = std::numeric_limits<double>::quiet_NaN();  // required
    std::size_t N = 1024;
    int n = 0;  // required, nonzero
    int s = +1;
    std::optional<double> P0;
    std::optional<double> beta;
    PotentialSpec potential;  // default zero
    MinimizeOptions min_opts;
    MountainPassOptions mp_opts;
    std::optional<SweepSpec> sweep;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

// --- low-level text helpers --------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s, std::size_t line, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(line, "key '" + key + "': expected a finite number, got '" + s + "'");
    }
    return v;
}

inline long long parse_int(const std::string& s, std::size_t line, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE) {
        throw ConfigError(line, "key '" + key + "': expected an integer, got '" + s + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& s, std::size_t line, const std::string& key) {
    if (s == "true" || s == "on" || s == "1") return true;
    if (s == "false" || s == "off" || s == "0") return false;
    throw ConfigError(line, "key '" + key + "': expected true/false, got '" + s + "'");
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline PotentialSpec parse_potential(const std::string& value, std::size_t line) {
    const std::vector<std::string> tok = split_ws(value);
    if (tok.empty()) throw ConfigError(line, "empty potential");
    try {
        if (tok[0] == "zero" && tok.size() == 1) {
            return PotentialSpec::zero();
        }
        if (tok[0] == "constant" && tok.size() == 2) {
            return PotentialSpec::constant(parse_double(tok[1], line, "potential"));
        }
        if (tok[0] == "bessel_j1_sq" && tok.size() == 3) {
            return PotentialSpec::bessel_j1_sq(parse_double(tok[1], line, "potential"),
                                               parse_double(tok[2], line, "potential"));
        }
        if (tok[0] == "tabulated" && tok.size() == 2) {
            std::vector<double> rs, vs;
            std::istringstream is(tok[1]);
            std::string pair;
            while (std::getline(is, pair, ',')) {
                const std::size_t colon = pair.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError(line, "tabulated potential entries must be r:V");
                }
                rs.push_back(parse_double(pair.substr(0, colon), line, "potential"));
                vs.push_back(parse_double(pair.substr(colon + 1), line, "potential"));
            }
            return PotentialSpec::tabulated(std::move(rs), std::move(vs));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(line, std::string("potential: ") + e.what());
    }
    throw ConfigError(line, "unrecognized potential '" + value + "'");
}

inline std::string potential_text(const PotentialSpec& p) {
    switch (p.kind) {
        case PotentialKind::zero:
            return "zero";
        case PotentialKind::constant:
            return "constant " + fmt_double(p.value);
        case PotentialKind::bessel_j1_sq:
            return "bessel_j1_sq " + fmt_double(p.p) + " " + fmt_double(p.b);
        case PotentialKind::tabulated: {
            std::string out = "tabulated ";
            for (std::size_t k = 0; k < p.table_r.size(); ++k) {
                if (k) out += ",";
                out += fmt_double(p.table_r[k]) + ":" + fmt_double(p.table_v[k]);
            }
            return out;
        }
    }
    return "?";
}

} // namespace detail

// --- config parsing -----------------------------------------------------------

/// Cross-field validation; fills nothing, throws ConfigError on violations.
inline void validate_run_config(const RunConfig& c) {
    if (!std::isfinite(c.R) || !(c.R > 0.0)) throw ConfigError("R must be set and positive");
    if (c.N < 2) throw ConfigError("N must be >= 2");
    if (c.n == 0) throw ConfigError("n must be a nonzero integer");
    if (c.s != 1 && c.s != -1) throw ConfigError("s must be +1 or -1");
    try {
        c.min_opts.validate();
        c.mp_opts.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const bool needs_P0 = c.mode == RunMode::minimize || c.mode == RunMode::check;
    const bool forbids_beta = c.mode == RunMode::minimize;
    if (needs_P0 && !c.P0) throw ConfigError("mode " + to_string(c.mode) + " requires P0");
    if (c.P0 && !(*c.P0 > 0.0)) throw ConfigError("P0 must be positive");
    if (c.mode == RunMode::mountainpass) {
        if (!c.beta) throw ConfigError("mode mountainpass requires beta");
        if (c.P0) throw ConfigError("mode mountainpass does not take P0");
    }
    if (forbids_beta && c.beta) throw ConfigError("mode minimize does not take beta");
    if (c.mode == RunMode::sweep) {
        if (!c.sweep) throw ConfigError("mode sweep requires sweep_param/sweep_from/sweep_to/sweep_count");
        const auto& sw = *c.sweep;
        if (sw.param != "n" && sw.param != "P0" && sw.param != "R" && sw.param != "beta") {
            throw ConfigError("sweep_param must be one of n, P0, R, beta");
        }
        if (sw.count < 1) throw ConfigError("sweep_count must be >= 1");
        if (sw.param == "beta") {
            if (c.P0) throw ConfigError("beta sweep does not take P0");
        } else if (sw.param != "P0" && !c.P0) {
            throw ConfigError("sweep over " + sw.param + " requires P0");
        }
    } else if (c.sweep) {
        throw ConfigError("sweep_* keys are only valid in mode sweep");
    }
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::map<std::string, std::size_t> seen;
    std::optional<SweepSpec> sweep;
    bool have_mode = false, have_R = false, have_n = false;
    std::size_t line_no = 0;

    std::istringstream is(text);
    std::string raw;
    while (std::getline(is, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line_no, "expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "key '" + key + "': missing value");
        if (auto [it, inserted] = seen.emplace(key, line_no); !inserted) {
            throw ConfigError(line_no, "duplicate key '" + key + "' (first at line " +
                                           std::to_string(it->second) + ")");
        }

        if (key == "mode") {
            if (value == "minimize") c.mode = RunMode::minimize;
            else if (value == "mountainpass") c.mode = RunMode::mountainpass;
            else if (value == "check") c.mode = RunMode::check;
            else if (value == "sweep") c.mode = RunMode::sweep;
            else throw ConfigError(line_no, "unknown mode '" + value + "'");
            have_mode = true;
        } else if (key == "R") {
            c.R = detail::parse_double(value, line_no, key);
            have_R = true;
        } else if (key == "N") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v < 2) throw ConfigError(line_no, "N must be >= 2");
            c.N = static_cast<std::size_t>(v);
        } else if (key == "n") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v == 0) throw ConfigError(line_no, "n must be nonzero");
            c.n = static_cast<int>(v);
            have_n = true;
        } else if (key == "s") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v != 1 && v != -1) throw ConfigError(line_no, "s must be +1 or -1");
            c.s = static_cast<int>(v);
        } else if (key == "P0") {
            c.P0 = detail::parse_double(value, line_no, key);
        } else if (key == "beta") {
            c.beta = detail::parse_double(value, line_no, key);
        } else if (key == "potential") {
            c.potential = detail::parse_potential(value, line_no);
        } else if (key == "grad_tol") {
            const double v = detail::parse_double(value, line_no, key);
            c.min_opts.grad_tol = v;
            c.mp_opts.grad_tol = v;
        } else if (key == "max_iters") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v < 1) throw ConfigError(line_no, "max_iters must be >= 1");
            c.min_opts.max_iters = static_cast<std::size_t>(v);
            c.mp_opts.max_iters = static_cast<std::size_t>(v);
        } else if (key == "step_init") {
            c.min_opts.step_init = detail::parse_double(value, line_no, key);
        } else if (key == "step_shrink") {
            c.min_opts.step_shrink = detail::parse_double(value, line_no, key);
        } else if (key == "enforce_positive") {
            c.min_opts.enforce_positive = detail::parse_bool(value, line_no, key);
        } else if (key == "path_knots") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v < 3) throw ConfigError(line_no, "path_knots must be >= 3");
            c.mp_opts.M = static_cast<std::size_t>(v);
        } else if (key == "step") {
            c.mp_opts.step = detail::parse_double(value, line_no, key);
        } else if (key == "sweep_param") {
            if (!sweep) sweep.emplace();
            sweep->param = value;
        } else if (key == "sweep_from") {
            if (!sweep) sweep.emplace();
            sweep->from = detail::parse_double(value, line_no, key);
        } else if (key == "sweep_to") {
            if (!sweep) sweep.emplace();
            sweep->to = detail::parse_double(value, line_no, key);
        } else if (key == "sweep_count") {
            const long long v = detail::parse_int(value, line_no, key);
            if (v < 1) throw ConfigError(line_no, "sweep_count must be >= 1");
            if (!sweep) sweep.emplace();
            sweep->count = static_cast<std::size_t>(v);
        } else if (key == "seed") {
            c.seed = static_cast<std::uint64_t>(detail::parse_int(value, line_no, key));
        } else if (key == "out") {
            c.out_dir = value;
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }

    if (!have_mode) throw ConfigError("missing required key 'mode'");
    if (!have_R) throw ConfigError("missing required key 'R'");
    if (!have_n) throw ConfigError("missing required key 'n'");
    c.sweep = std::move(sweep);
    validate_run_config(c);
    return c;
}

// --- profile CSV ---------------------------------------------------------------

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
        os << content;
        if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string profile_csv_text(const RadialGrid& grid, const Profile& u) {
    std::string out = "r,u\n";
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        out += detail::fmt_double(grid.node(i));
        out += ",";
        out += detail::fmt_double(u[i]);
        out += "\n";
    }
    return out;
}

inline void write_profile_csv(const std::filesystem::path& path, const RadialGrid& grid,
                              const Profile& u) {
    write_file_atomic(path, profile_csv_text(grid, u));
}

/// Re-ingests a profile CSV; the grid is rebuilt from the last radius and the
/// row count, reproducing moments bit-exactly.
inline std::pair<RadialGrid, Profile> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open profile CSV: " + path.string());
    std::string line;
    if (!std::getline(is, line) || detail::trim(line) != "r,u") {
        throw std::runtime_error("profile CSV must start with header 'r,u': " + path.string());
    }
    std::vector<double> rs, us;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const std::size_t comma = t.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("profile CSV row without comma at line " +
                                     std::to_string(line_no));
        }
        rs.push_back(detail::parse_double(t.substr(0, comma), line_no, "r"));
        us.push_back(detail::parse_double(t.substr(comma + 1), line_no, "u"));
    }
    if (rs.size() < 4) throw std::runtime_error("profile CSV too short");
    RadialGrid grid = build_grid(rs.back(), rs.size() - 2);
    Profile u = make_profile(grid, std::move(us));
    return {std::move(grid), std::move(u)};
}

// --- report ---------------------------------------------------------------------

struct Report {
    std::string tool;
    std::vector<std::pair<std::string, std::string>> config;  // ordered echo
    std::optional<bool> converged;
    std::optional<std::int64_t> iterations;
    std::optional<double> beta, P, I, E, Ibeta, L_z, residual_norm, level;
    std::optional<std::string> profile_file;
    std::vector<std::string> warnings;
    std::vector<BoundRecord> bounds;
    std::vector<InequalityCheck> inequalities;

    bool operator==(const Report&) const = default;
};

inline std::string write_report(const Report& r) {
    std::string out;
    auto kv = [&out](const std::string& k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    };
    kv("report_version", "1");
    kv("tool", r.tool);
    for (const auto& [k, v] : r.config) kv("config." + k, v);
    if (r.converged) kv("result.converged", *r.converged ? "true" : "false");
    if (r.iterations) kv("result.iterations", std::to_string(*r.iterations));
    if (r.beta) kv("result.beta", detail::fmt_double(*r.beta));
    if (r.P) kv("result.P", detail::fmt_double(*r.P));
    if (r.I) kv("result.I", detail::fmt_double(*r.I));
    if (r.E) kv("result.E", detail::fmt_double(*r.E));
    if (r.Ibeta) kv("result.Ibeta", detail::fmt_double(*r.Ibeta));
    if (r.L_z) kv("result.L_z", detail::fmt_double(*r.L_z));
    if (r.residual_norm) kv("result.residual_norm", detail::fmt_double(*r.residual_norm));
    if (r.level) kv("result.level", detail::fmt_double(*r.level));
    if (r.profile_file) kv("profile_file", *r.profile_file);
    for (std::size_t i = 0; i < r.warnings.size(); ++i) {
        kv("warning[" + std::to_string(i) + "]", r.warnings[i]);
    }
    for (std::size_t i = 0; i < r.bounds.size(); ++i) {
        const std::string p = "bound[" + std::to_string(i) + "].";
        const BoundRecord& b = r.bounds[i];
        kv(p + "name", b.name);
        kv(p + "inputs", b.inputs);
        kv(p + "bound_value", detail::fmt_double(b.bound_value));
        kv(p + "observed", detail::fmt_double(b.observed));
        kv(p + "verdict", to_string(b.verdict));
        kv(p + "statement", b.statement);
    }
    for (std::size_t i = 0; i < r.inequalities.size(); ++i) {
        const std::string p = "ineq[" + std::to_string(i) + "].";
        const InequalityCheck& q = r.inequalities[i];
        kv(p + "name", q.name);
        kv(p + "statement", q.statement);
        kv(p + "violations", std::to_string(q.violations));
        kv(p + "worst_excess", detail::fmt_double(q.worst_excess));
    }
    return out;
}

inline Report parse_report(const std::string& text) {
    Report r;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    auto as_double = [&](const std::string& v, const std::string& key) {
        return detail::parse_double(v, line_no, key);
    };
    auto index_of = [](const std::string& key, const std::string& prefix,
                       std::string& field) -> std::optional<std::size_t> {
        if (key.rfind(prefix, 0) != 0) return std::nullopt;
        const std::size_t rb = key.find(']', prefix.size());
        if (rb == std::string::npos || rb + 1 >= key.size() || key[rb + 1] != '.') {
            return std::nullopt;
        }
        field = key.substr(rb + 2);
        return static_cast<std::size_t>(
            std::stoull(key.substr(prefix.size(), rb - prefix.size())));
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const std::size_t sep = line.find(" = ");
        if (sep == std::string::npos) {
            throw std::runtime_error("report line " + std::to_string(line_no) +
                                     ": expected 'key = value'");
        }
        const std::string key = line.substr(0, sep);
        const std::string value = line.substr(sep + 3);
        std::string field;
        if (key == "report_version") {
            if (value != "1") throw std::runtime_error("unsupported report version " + value);
        } else if (key == "tool") {
            r.tool = value;
        } else if (key.rfind("config.", 0) == 0) {
            r.config.emplace_back(key.substr(7), value);
        } else if (key == "result.converged") {
            r.converged = (value == "true");
        } else if (key == "result.iterations") {
            r.iterations = std::stoll(value);
        } else if (key == "result.beta") {
            r.beta = as_double(value, key);
        } else if (key == "result.P") {
            r.P = as_double(value, key);
        } else if (key == "result.I") {
            r.I = as_double(value, key);
        } else if (key == "result.E") {
            r.E = as_double(value, key);
        } else if (key == "result.Ibeta") {
            r.Ibeta = as_double(value, key);
        } else if (key == "result.L_z") {
            r.L_z = as_double(value, key);
        } else if (key == "result.residual_norm") {
            r.residual_norm = as_double(value, key);
        } else if (key == "result.level") {
            r.level = as_double(value, key);
        } else if (key == "profile_file") {
            r.profile_file = value;
        } else if (key.rfind("warning[", 0) == 0 && key.back() == ']') {
            const std::size_t i = static_cast<std::size_t>(
                std::stoull(key.substr(8, key.size() - 9)));
            if (r.warnings.size() <= i) r.warnings.resize(i + 1);
            r.warnings[i] = value;
        } else if (auto bi = index_of(key, "bound[", field)) {
            if (r.bounds.size() <= *bi) r.bounds.resize(*bi + 1);
            BoundRecord& b = r.bounds[*bi];
            if (field == "name") b.name = value;
            else if (field == "inputs") b.inputs = value;
            else if (field == "bound_value") b.bound_value = as_double(value, key);
            else if (field == "observed") b.observed = as_double(value, key);
            else if (field == "verdict") {
                const auto v = parse_verdict(value);
                if (!v) throw std::runtime_error("bad verdict '" + value + "'");
                b.verdict = *v;
            } else if (field == "statement") b.statement = value;
            else throw std::runtime_error("unknown bound field '" + field + "'");
        } else if (auto qi = index_of(key, "ineq[", field)) {
            if (r.inequalities.size() <= *qi) r.inequalities.resize(*qi + 1);
            InequalityCheck& q = r.inequalities[*qi];
            if (field == "name") q.name = value;
            else if (field == "statement") q.statement = value;
            else if (field == "violations") q.violations = std::stoull(value);
            else if (field == "worst_excess") q.worst_excess = as_double(value, key);
            else throw std::runtime_error("unknown ineq field '" + field + "'");
        } else {
            throw std::runtime_error("report line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
        }
    }
    return r;
}

// --- run orchestration -----------------------------------------------------------

namespace detail {

inline std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& c) {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("mode", to_string(c.mode));
    e.emplace_back("R", fmt_double(c.R));
    e.emplace_back("N", std::to_string(c.N));
    e.emplace_back("n", std::to_string(c.n));
    e.emplace_back("s", std::to_string(c.s));
    if (c.P0) e.emplace_back("P0", fmt_double(*c.P0));
    if (c.beta) e.emplace_back("beta", fmt_double(*c.beta));
    e.emplace_back("potential", potential_text(c.potential));
    const bool minimize_like =
        c.mode == RunMode::minimize ||
        (c.mode == RunMode::sweep && c.sweep && c.sweep->param != "beta");
    const bool mp_like = c.mode == RunMode::mountainpass ||
                         (c.mode == RunMode::sweep && c.sweep && c.sweep->param == "beta");
    if (minimize_like) {
        e.emplace_back("grad_tol", fmt_double(c.min_opts.grad_tol));
        e.emplace_back("max_iters", std::to_string(c.min_opts.max_iters));
        e.emplace_back("step_init", fmt_double(c.min_opts.step_init));
        e.emplace_back("step_shrink", fmt_double(c.min_opts.step_shrink));
        e.emplace_back("enforce_positive",
                       c.min_opts.enforce_positive.value_or(c.s == +1) ? "true" : "false");
    }
    if (mp_like) {
        e.emplace_back("grad_tol", fmt_double(c.mp_opts.grad_tol));
        e.emplace_back("max_iters", std::to_string(c.mp_opts.max_iters));
        e.emplace_back("path_knots", std::to_string(c.mp_opts.M));
        e.emplace_back("step", fmt_double(c.mp_opts.step));
    }
    if (c.sweep) {
        e.emplace_back("sweep_param", c.sweep->param);
        e.emplace_back("sweep_from", fmt_double(c.sweep->from));
        e.emplace_back("sweep_to", fmt_double(c.sweep->to));
        e.emplace_back("sweep_count", std::to_string(c.sweep->count));
    }
    e.emplace_back("seed", std::to_string(c.seed));
    return e;
}

inline int worse_exit(int a, int b) { return std::max(a, b); }

} // namespace detail

inline int run(const RunConfig& config);

namespace detail {

inline int run_minimize(const RunConfig& c, const std::filesystem::path& out) {
    const RadialGrid grid = build_grid(c.R, c.N);
    const PotentialSummary summary = summarize(c.potential, grid);
    MinimizeResult res = minimize_constrained(grid, c.potential, c.n, *c.P0, c.s, c.min_opts);

    Report rep;
    rep.tool = tool_version;
    rep.config = echo_config(c);
    rep.converged = res.converged;
    rep.iterations = static_cast<std::int64_t>(res.iterations);
    rep.beta = res.beta;
    rep.P = res.values.P;
    rep.I = res.values.I;
    rep.E = res.values.E;
    rep.Ibeta = res.values.Ibeta;
    rep.L_z = angular_momentum(c.n, res.values.P);
    rep.residual_norm = res.residual_norm;
    rep.profile_file = "profile.csv";
    rep.warnings = res.warnings;
    rep.bounds = minimize_bound_report(grid, c.potential, summary, c.n, *c.P0, c.s,
                                       res.converged, res.beta, res.values.P,
                                       res.residual_norm, res.profile);

    write_profile_csv(out / "profile.csv", grid, res.profile);
    write_file_atomic(out / "report.txt", write_report(rep));

    if (!res.converged) return exit_no_convergence;
    for (const BoundRecord& b : rep.bounds) {
        if (!b.ok()) return exit_bound_failure;
    }
    return exit_ok;
}

inline int run_mountainpass(const RunConfig& c, const std::filesystem::path& out) {
    const RadialGrid grid = build_grid(c.R, c.N);
    const PotentialSummary summary = summarize(c.potential, grid);
    MountainPassResult res = mountain_pass_solve(grid, c.potential, c.n, *c.beta, c.mp_opts);

    Report rep;
    rep.tool = tool_version;
    rep.config = echo_config(c);
    rep.converged = res.converged;
    rep.iterations = static_cast<std::int64_t>(res.iterations);
    rep.beta = *c.beta;
    const std::vector<double> v_mid = sample_midpoints(c.potential, grid);
    const FunctionalValues f =
        eval_functionals(grid, res.profile, v_mid, c.n, +1, *c.beta, true);
    rep.P = f.P;
    rep.I = f.I;
    rep.E = f.E;
    rep.Ibeta = f.Ibeta;
    rep.L_z = angular_momentum(c.n, f.P);
    rep.residual_norm = res.residual_norm;
    rep.level = res.level;
    rep.profile_file = "profile.csv";
    rep.warnings = res.warnings;
    if (*c.beta < summary.V0plus) {
        rep.warnings.push_back("outside Theorem 2 hypothesis: beta < V0plus");
    }
    rep.bounds = mountainpass_bound_report(grid, summary, c.n, *c.beta, res.converged,
                                           res.level, c.mp_opts.grad_tol,
                                           res.residual_norm, res.profile);

    write_profile_csv(out / "profile.csv", grid, res.profile);
    write_file_atomic(out / "report.txt", write_report(rep));

    if (!res.converged) return exit_no_convergence;
    for (const BoundRecord& b : rep.bounds) {
        if (!b.ok()) return exit_bound_failure;
    }
    return exit_ok;
}

inline int run_check(const RunConfig& c, const std::filesystem::path& out) {
    const RadialGrid grid = build_grid(c.R, c.N);
    const PotentialSummary summary = summarize(c.potential, grid);
    const double P0 = *c.P0;
    const double abs_n = std::abs(c.n);

    Report rep;
    rep.tool = tool_version;
    rep.config = echo_config(c);

    {
        BoundRecord r;
        r.name = "power_bound";
        r.statement = "P0 < 4*pi*|n|";
        r.inputs = fmt_inputs({{"P0", P0}, {"n", abs_n}});
        r.bound_value = 2.0 * two_pi * abs_n;
        r.observed = P0;
        r.verdict = power_bound_ok(P0, c.n) ? Verdict::pass : Verdict::fail;
        rep.bounds.push_back(std::move(r));
    }
    {
        BoundRecord r;
        r.name = "beta_lower_bound";
        r.statement = "beta >= 7*P0/(5*pi*R^2) - V0minus - (12/R^2)*(1 + n^2*(2*ln2 - 1))";
        r.inputs = fmt_inputs({{"P0", P0}, {"R", c.R}, {"n", abs_n}, {"V0minus", summary.V0minus}});
        r.bound_value = beta_lower_bound(P0, c.R, c.n, summary.V0minus);
        r.observed = c.beta.value_or(0.0);
        r.verdict = c.beta ? verdict_ge(*c.beta, r.bound_value) : Verdict::not_applicable;
        rep.bounds.push_back(std::move(r));
    }
    {
        BoundRecord r;
        r.name = "beta_negativity_threshold";
        r.statement = "|n| > sqrt(P0^2/(4*pi^2) + max r^2 V+)  =>  beta < 0";
        r.bound_value = beta_negativity_threshold(P0, summary);
        r.observed = abs_n;
        r.inputs = fmt_inputs({{"P0", P0}, {"max_r2_Vplus", summary.max_r2_Vplus}});
        r.verdict = Verdict::not_applicable;
        rep.bounds.push_back(std::move(r));
    }
    {
        BoundRecord r;
        r.name = "defocusing_beta_bound";
        r.statement = "beta < -((r0^2 + n^2)/R^2 - V0plus)";
        r.inputs = fmt_inputs({{"R", c.R}, {"n", abs_n}, {"V0plus", summary.V0plus}});
        r.bound_value = defocusing_beta_bound(c.n, c.R, summary.V0plus);
        r.observed = c.beta.value_or(0.0);
        r.verdict = Verdict::not_applicable;
        rep.bounds.push_back(std::move(r));
    }
    if (summary.V0plus == 0.0) {
        const NonpositivePotentialThresholds t =
            nonpositive_potential_thresholds(P0, c.n, c.beta.value_or(0.0));
        BoundRecord r;
        r.name = "nonpositive_potential_thresholds";
        r.statement = "V+ == 0: |n| > P0/(2*pi) => beta < 0; P0 <= 1/2 and beta >= 0 => no solution";
        r.inputs = fmt_inputs({{"P0", P0}, {"n", abs_n}, {"beta", c.beta.value_or(0.0)}});
        r.bound_value = P0 / two_pi;
        r.observed = t.beta_negative_guaranteed ? 1.0 : 0.0;
        r.verdict = Verdict::not_applicable;
        rep.bounds.push_back(std::move(r));
        if (c.beta) {
            BoundRecord r2;
            r2.name = "nonexistence_regime";
            r2.statement = "P0 <= 1/2 and n^2 > r^2*(V+ - beta) over the grid";
            r2.inputs = fmt_inputs({{"P0", P0}, {"beta", *c.beta}});
            r2.bound_value = 0.5;
            r2.observed = nonexistence_verdict(c.n, *c.beta, c.potential, grid, P0) ? 1.0 : 0.0;
            r2.verdict = Verdict::not_applicable;
            rep.bounds.push_back(std::move(r2));
        }
    }

    rep.inequalities = inequality_suite(grid, 200, c.seed);
    write_file_atomic(out / "report.txt", write_report(rep));

    for (const InequalityCheck& q : rep.inequalities) {
        if (q.violations > 0) return exit_bound_failure;
    }
    for (const BoundRecord& b : rep.bounds) {
        if (!b.ok()) return exit_bound_failure;
    }
    return exit_ok;
}

inline int run_sweep(const RunConfig& c, const std::filesystem::path& out) {
    const SweepSpec sw = *c.sweep;
    int worst = exit_ok;
    std::string summary_csv = sw.param + ",beta\n";

    for (std::size_t k = 0; k < sw.count; ++k) {
        const double t = sw.count == 1
                             ? 0.0
                             : static_cast<double>(k) / static_cast<double>(sw.count - 1);
        const double value = sw.from + t * (sw.to - sw.from);

        RunConfig pc = c;
        pc.sweep.reset();
        if (sw.param == "beta") {
            pc.mode = RunMode::mountainpass;
            pc.beta = value;
        } else {
            pc.mode = RunMode::minimize;
            if (sw.param == "n") {
                const long long vn = std::llround(value);
                if (vn == 0) throw ConfigError("sweep over n crosses n = 0");
                pc.n = static_cast<int>(vn);
            } else if (sw.param == "P0") {
                pc.P0 = value;
            } else {
                pc.R = value;
            }
        }
        char dir_name[32];
        std::snprintf(dir_name, sizeof dir_name, "point_%03zu", k);
        const std::filesystem::path pdir = out / dir_name;
        std::filesystem::create_directories(pdir);
        pc.out_dir = pdir.string();
        validate_run_config(pc);
        worst = worse_exit(worst, run(pc));

        const Report rep = parse_report([&] {
            std::ifstream is(pdir / "report.txt");
            std::ostringstream os;
            os << is.rdbuf();
            return os.str();
        }());
        const double axis_value =
            sw.param == "n" ? static_cast<double>(pc.n)
                            : (sw.param == "beta" ? *pc.beta
                                                  : (sw.param == "P0" ? *pc.P0 : pc.R));
        summary_csv += fmt_double(axis_value) + "," +
                       fmt_double(rep.beta.value_or(0.0)) + "\n";
    }
    write_file_atomic(out / "summary.csv", summary_csv);
    return worst;
}

} // namespace detail

/// Executes a validated config; writes artifacts under config.out_dir and
/// returns the process exit code.
inline int run(const RunConfig& config) {
    validate_run_config(config);
    const std::filesystem::path out(config.out_dir);
    std::filesystem::create_directories(out);
    switch (config.mode) {
        case RunMode::minimize: return detail::run_minimize(config, out);
        case RunMode::mountainpass: return detail::run_mountainpass(config, out);
        case RunMode::check: return detail::run_check(config, out);
        case RunMode::sweep: return detail::run_sweep(config, out);
    }
    return exit_usage;
}

} // namespace ringvortex
