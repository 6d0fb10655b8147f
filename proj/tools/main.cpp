// Command-line front end: minimize | mountainpass | check | sweep, configured
// from a key = value file with flag overrides. Exit codes: 0 converged/ok,
// 1 usage or config error, 2 solver non-convergence, 3 bound-verdict failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ringvortex/io.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_dir;
    std::optional<long long> grid_N;
    std::optional<double> R;
    std::optional<long long> n;
    std::optional<double> P0;
    std::optional<double> beta;
    std::optional<long long> s;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "config file (key = value lines)");
    cmd->add_option("--out", o.out_dir, "output directory (default: config 'out' or '.')");
    cmd->add_option("--grid", o.grid_N, "interior node count N");
    cmd->add_option("--R", o.R, "outer radius");
    cmd->add_option("--n", o.n, "vortex winding number");
    cmd->add_option("--P0", o.P0, "beam power constraint");
    cmd->add_option("--beta", o.beta, "prescribed propagation constant");
    cmd->add_option("--s", o.s, "nonlinearity sign, +1 or -1");
}

int dispatch(ringvortex::RunMode mode, const CliOverrides& o) {
    using namespace ringvortex;
    RunConfig config;
    if (!o.config_path.empty()) {
        std::ifstream is(o.config_path);
        if (!is) {
            std::cerr << "error: cannot open config file '" << o.config_path << "'\n";
            return exit_usage;
        }
        std::ostringstream os;
        os << is.rdbuf();
        config = parse_config(os.str());
        if (config.mode != mode) {
            std::cerr << "error: config mode '" << to_string(config.mode)
                      << "' does not match subcommand '" << to_string(mode) << "'\n";
            return exit_usage;
        }
    } else {
        config.mode = mode;
    }
    if (!o.out_dir.empty()) config.out_dir = o.out_dir;
    if (o.grid_N) config.N = static_cast<std::size_t>(*o.grid_N);
    if (o.R) config.R = *o.R;
    if (o.n) config.n = static_cast<int>(*o.n);
    if (o.P0) config.P0 = *o.P0;
    if (o.beta) config.beta = *o.beta;
    if (o.s) config.s = static_cast<int>(*o.s);

    validate_run_config(config);
    const int code = run(config);
    std::cout << to_string(mode) << ": exit " << code << ", artifacts in '"
              << config.out_dir << "'\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ring-vortex profile solver for the radial nonlinear Schrodinger "
                 "boundary value problem"};
    app.require_subcommand(1);

    CliOverrides o;
    auto* cmd_min = app.add_subcommand("minimize", "power-constrained minimization");
    auto* cmd_mp = app.add_subcommand("mountainpass", "saddle search at prescribed beta");
    auto* cmd_check = app.add_subcommand("check", "evaluate bounds without solving");
    auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep of solves");
    for (auto* cmd : {cmd_min, cmd_mp, cmd_check, cmd_sweep}) {
        add_common_options(cmd, o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : ringvortex::exit_usage;
    }

    try {
        if (cmd_min->parsed()) return dispatch(ringvortex::RunMode::minimize, o);
        if (cmd_mp->parsed()) return dispatch(ringvortex::RunMode::mountainpass, o);
        if (cmd_check->parsed()) return dispatch(ringvortex::RunMode::check, o);
        if (cmd_sweep->parsed()) return dispatch(ringvortex::RunMode::sweep, o);
    } catch (const ringvortex::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ringvortex::exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ringvortex::exit_usage;
    }
    return ringvortex::exit_usage;
}
