#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ringvortex/io.hpp"

using namespace ringvortex;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ringvortex_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("parse_config fills defaults") {
    const RunConfig c = parse_config(
        "mode = minimize\n"
        "R = 2\n"
        "n = 1\n"
        "P0 = 1.0\n");
    CHECK(c.mode == RunMode::minimize);
    CHECK(c.N == 1024);
    CHECK(c.s == +1);
    CHECK(c.potential.kind == PotentialKind::zero);
    CHECK(c.min_opts.grad_tol == 1e-8);
    CHECK(c.min_opts.max_iters == 200000);
    CHECK(c.mp_opts.M == 41);
    CHECK(c.seed == 0);
    REQUIRE(c.P0.has_value());
    CHECK(*c.P0 == 1.0);
}

TEST_CASE("parse_config rejects malformed input with line anchors") {
    auto message_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    SECTION("mountainpass without beta") {
        const std::string msg = message_of("mode = mountainpass\nR = 1\nn = 1\n");
        CHECK(msg.find("requires beta") != std::string::npos);
    }

    SECTION("minimize with beta") {
        const std::string msg =
            message_of("mode = minimize\nR = 1\nn = 1\nP0 = 1\nbeta = 2\n");
        CHECK(msg.find("does not take beta") != std::string::npos);
    }

    SECTION("unknown key carries its line number") {
        const std::string msg = message_of("mode = minimize\nR = 1\nn = 1\nP0 = 1\nfoo = 3\n");
        CHECK(msg.find("config:5") != std::string::npos);
        CHECK(msg.find("unknown key 'foo'") != std::string::npos);
    }

    SECTION("domain violations") {
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = -1\nn = 1\nP0 = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nn = 0\nP0 = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nn = 1\nP0 = 1\nN = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nn = 1\nP0 = 1\ns = 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nn = 1\nP0 = 1\nstep_shrink = 1.5\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nn = 1\nP0 = nope\n"), ConfigError);
    }

    SECTION("duplicate and missing keys") {
        CHECK_THROWS_AS(parse_config("mode = minimize\nR = 1\nR = 2\nn = 1\nP0 = 1\n"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config("mode = minimize\nn = 1\nP0 = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("R = 1\nn = 1\nP0 = 1\n"), ConfigError);
    }
}

TEST_CASE("parse_config potentials and comments") {
    const RunConfig c = parse_config(
        "# a comment line\n"
        "mode = check\n"
        "R = 1.5   # trailing comment\n"
        "n = 2\n"
        "P0 = 3\n"
        "potential = bessel_j1_sq 1.5 2.0\n"
        "seed = 42\n");
    CHECK(c.potential.kind == PotentialKind::bessel_j1_sq);
    CHECK(c.potential.p == 1.5);
    CHECK(c.potential.b == 2.0);
    CHECK(c.seed == 42);

    const RunConfig t = parse_config(
        "mode = minimize\nR = 2\nn = 1\nP0 = 1\npotential = tabulated 0:0,1:2.5,2:0\n");
    CHECK(t.potential.kind == PotentialKind::tabulated);
    CHECK(t.potential.table_v[1] == 2.5);
}

TEST_CASE("profile CSV round trip reproduces moments bit-exactly") {
    const fs::path dir = fresh_dir("csv");
    const RadialGrid g = build_grid(1.7, 97);
    Profile u = zero_profile(g);
    for (std::size_t i = 1; i <= g.N; ++i) {
        u[i] = std::sin(2.7 * g.node(i)) / (1.0 + g.node(i));
    }
    write_profile_csv(dir / "profile.csv", g, u);

    const std::string text = slurp(dir / "profile.csv");
    CHECK(text.rfind("r,u\n", 0) == 0);
    CHECK(text.find("\r") == std::string::npos);

    const auto [g2, u2] = read_profile_csv(dir / "profile.csv");
    CHECK(g2.R == g.R);
    CHECK(g2.N == g.N);
    const Moments m1 = moments(g, u);
    const Moments m2 = moments(g2, u2);
    CHECK(m1.m_ru2 == m2.m_ru2);
    CHECK(m1.m_rur2 == m2.m_rur2);
    CHECK(m1.m_u2_over_r == m2.m_u2_over_r);
    CHECK(m1.m_ru4 == m2.m_ru4);
}

TEST_CASE("report round trip is lossless") {
    Report r;
    r.tool = tool_version;
    r.config = {{"mode", "minimize"}, {"R", "2"}, {"n", "1"}, {"P0", "0.10000000000000001"}};
    r.converged = true;
    r.iterations = 123;
    r.beta = -3.5588830833596718;
    r.P = 1.2566370614359172;
    r.I = 0.3333333333333333;
    r.E = 2.7182818284590452;
    r.Ibeta = -0.1;
    r.L_z = 1.2566370614359172;
    r.residual_norm = 4.2e-9;
    r.profile_file = "profile.csv";
    r.warnings = {"outside Theorem 1 regime: P0 >= 4*pi*|n|"};
    BoundRecord b;
    b.name = "power_bound";
    b.inputs = "P0=1;n=1";
    b.bound_value = 12.566370614359172;
    b.observed = 1.0;
    b.verdict = Verdict::pass;
    b.statement = "P0 < 4*pi*|n|";
    r.bounds.push_back(b);
    InequalityCheck q;
    q.name = "schwartz_power";
    q.statement = "(int r u^2)^2 <= (R^2/2) int r u^4";
    q.violations = 0;
    q.worst_excess = -1.25e-7;
    r.inequalities.push_back(q);

    const std::string text = write_report(r);
    const Report back = parse_report(text);
    CHECK(back == r);
    // serialization is stable
    CHECK(write_report(back) == text);
}

TEST_CASE("run minimize writes artifacts and returns exit 0") {
    const fs::path dir = fresh_dir("run_min");
    RunConfig c;
    c.mode = RunMode::minimize;
    c.R = 1.0;
    c.N = 64;
    c.n = 1;
    c.P0 = 0.5;
    c.out_dir = dir.string();
    const int code = run(c);
    CHECK(code == exit_ok);
    REQUIRE(fs::exists(dir / "report.txt"));
    REQUIRE(fs::exists(dir / "profile.csv"));

    const Report rep = parse_report(slurp(dir / "report.txt"));
    CHECK(rep.tool == tool_version);
    REQUIRE(rep.converged.has_value());
    CHECK(*rep.converged);
    REQUIRE(rep.beta.has_value());
    REQUIRE(rep.P.has_value());
    CHECK(*rep.P == Catch::Approx(0.5).epsilon(1e-10));
    REQUIRE(rep.L_z.has_value());
    CHECK(*rep.L_z == Catch::Approx(*rep.P).epsilon(1e-14));  // n = 1
    CHECK_FALSE(rep.bounds.empty());
}

TEST_CASE("run reports non-convergence with exit 2") {
    const fs::path dir = fresh_dir("run_noconv");
    RunConfig c;
    c.mode = RunMode::minimize;
    c.R = 1.0;
    c.N = 64;
    c.n = 1;
    c.P0 = 0.5;
    c.min_opts.max_iters = 2;
    c.min_opts.grad_tol = 1e-14;
    c.out_dir = dir.string();
    CHECK(run(c) == exit_no_convergence);
    const Report rep = parse_report(slurp(dir / "report.txt"));
    REQUIRE(rep.converged.has_value());
    CHECK_FALSE(*rep.converged);
}

TEST_CASE("run check emits only a report") {
    const fs::path dir = fresh_dir("run_check");
    RunConfig c;
    c.mode = RunMode::check;
    c.R = 1.0;
    c.N = 64;
    c.n = 1;
    c.P0 = 0.4;
    c.beta = 0.0;
    c.seed = 7;
    c.out_dir = dir.string();
    CHECK(run(c) == exit_ok);
    CHECK(fs::exists(dir / "report.txt"));
    CHECK_FALSE(fs::exists(dir / "profile.csv"));

    const Report rep = parse_report(slurp(dir / "report.txt"));
    CHECK_FALSE(rep.profile_file.has_value());
    CHECK_FALSE(rep.bounds.empty());
    CHECK(rep.inequalities.size() == 3);
    for (const auto& q : rep.inequalities) CHECK(q.violations == 0);
}

TEST_CASE("mountainpass below V0plus runs with a hypothesis warning") {
    const fs::path dir = fresh_dir("run_mp_warn");
    RunConfig c;
    c.mode = RunMode::mountainpass;
    c.R = 1.0;
    c.N = 64;
    c.n = 1;
    c.beta = 1.0;  // below V0plus = 2
    c.potential = PotentialSpec::constant(2.0);
    c.mp_opts.grad_tol = 1e-5;
    c.out_dir = dir.string();
    const int code = run(c);
    const Report rep = parse_report(slurp(dir / "report.txt"));
    bool found = false;
    for (const auto& w : rep.warnings) {
        if (w.find("outside Theorem 2 hypothesis") != std::string::npos) found = true;
    }
    CHECK(found);
    CHECK((code == exit_ok || code == exit_no_convergence));
}

TEST_CASE("identical configs produce bitwise-identical artifacts") {
    RunConfig c;
    c.mode = RunMode::minimize;
    c.R = 2.0;
    c.N = 128;
    c.n = 2;
    c.P0 = 3.0;
    c.potential = PotentialSpec::constant(-1.0);
    c.seed = 99;

    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    c.out_dir = d1.string();
    REQUIRE(run(c) == exit_ok);
    c.out_dir = d2.string();
    REQUIRE(run(c) == exit_ok);
    CHECK(slurp(d1 / "report.txt") == slurp(d2 / "report.txt"));
    CHECK(slurp(d1 / "profile.csv") == slurp(d2 / "profile.csv"));
}

TEST_CASE("sweep over n emits per-point reports and a summary table") {
    const fs::path dir = fresh_dir("sweep_n");
    RunConfig c;
    c.mode = RunMode::sweep;
    c.R = 1.0;
    c.N = 64;
    c.n = 1;
    c.P0 = 0.5;
    c.sweep = SweepSpec{"n", 1.0, 3.0, 3};
    c.out_dir = dir.string();
    CHECK(run(c) == exit_ok);

    REQUIRE(fs::exists(dir / "summary.csv"));
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.rfind("n,beta\n", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);  // header + 3 rows
    for (const char* p : {"point_000", "point_001", "point_002"}) {
        CHECK(fs::exists(dir / p / "report.txt"));
        CHECK(fs::exists(dir / p / "profile.csv"));
    }
    const Report rep2 = parse_report(slurp(dir / "point_002" / "report.txt"));
    bool saw_n3 = false;
    for (const auto& [k, v] : rep2.config) {
        if (k == "n" && v == "3") saw_n3 = true;
    }
    CHECK(saw_n3);
}

TEST_CASE("validate_run_config cross-field rules") {
    RunConfig c;
    c.mode = RunMode::minimize;
    c.R = 1.0;
    c.n = 1;
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);  // P0 missing
    c.P0 = 1.0;
    validate_run_config(c);
    c.sweep = SweepSpec{"n", 1, 2, 2};
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);  // sweep keys outside sweep mode
    c.mode = RunMode::sweep;
    validate_run_config(c);
    c.sweep->param = "bogus";
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
}
