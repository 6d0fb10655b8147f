#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ringvortex/potentials.hpp"

using namespace ringvortex;

namespace {

// Independent series oracle for J1, valid for small arguments:
// J1(x) = sum_k (-1)^k / (k! (k+1)!) (x/2)^(2k+1).
double j1_series(double x) {
    double term = 0.5 * x;
    double sum = term;
    for (int k = 1; k <= 20; ++k) {
        term *= -(0.25 * x * x) / (static_cast<double>(k) * (k + 1));
        sum += term;
    }
    return sum;
}

} // namespace

TEST_CASE("evaluate basics") {
    CHECK(evaluate(PotentialSpec::zero(), 0.3) == 0.0);
    CHECK(evaluate(PotentialSpec::zero(), 0.0) == 0.0);
    CHECK(evaluate(PotentialSpec::constant(-3.0), 0.7) == -3.0);
    CHECK_THROWS_AS(evaluate(PotentialSpec::zero(), -0.1), std::invalid_argument);
}

TEST_CASE("bessel potential against the series oracle") {
    const PotentialSpec spec = PotentialSpec::bessel_j1_sq(1.0, 1.0);
    CHECK(evaluate(spec, 0.0) == 0.0);  // J1(0) = 0
    for (double r : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
        const double j1 = j1_series(r);
        CHECK(evaluate(spec, r) == Catch::Approx(j1 * j1).epsilon(1e-12));
    }
    // scaled arguments and amplitude
    const PotentialSpec spec2 = PotentialSpec::bessel_j1_sq(2.5, 3.0);
    const double j1 = j1_series(3.0 * 0.2);
    CHECK(evaluate(spec2, 0.2) == Catch::Approx(2.5 * j1 * j1).epsilon(1e-12));
}

TEST_CASE("bessel J1 matches the large-argument asymptotic form") {
    // J1(x) ~ sqrt(2/(pi x)) cos(x - 3 pi/4), correction O(x^-3/2)
    for (double x : {20.0, 50.0, 100.0}) {
        const double j1 = std::cyl_bessel_j(1, x);
        const double asym =
            std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x - 0.75 * std::numbers::pi);
        CHECK(std::abs(j1 - asym) < 1.0 / (x * std::sqrt(x)));
    }
}

TEST_CASE("tabulated potential interpolates linearly and rejects out-of-range") {
    const PotentialSpec spec = PotentialSpec::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
    CHECK(evaluate(spec, 0.5) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(spec, 1.0) == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(evaluate(spec, 1.5) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(spec, 2.0) == 0.0);
    CHECK_THROWS_AS(evaluate(spec, 2.5), std::invalid_argument);

    CHECK_THROWS_AS(PotentialSpec::tabulated({0.0, 1.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::tabulated({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(PotentialSpec::tabulated({0.5, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("summarize decomposes into positive and negative parts") {
    const RadialGrid g = build_grid(1.0, 64);

    SECTION("constant -3") {
        const PotentialSummary s = summarize(PotentialSpec::constant(-3.0), g);
        CHECK(s.V0plus == 0.0);
        CHECK(s.V0minus == 3.0);
        CHECK(s.V0 == 3.0);
        CHECK(s.max_r2_Vplus == 0.0);
    }

    SECTION("constant +2 on R = 1") {
        const PotentialSummary s = summarize(PotentialSpec::constant(2.0), g);
        CHECK(s.V0plus == 2.0);
        CHECK(s.V0minus == 0.0);
        CHECK(s.max_r2_Vplus == Catch::Approx(2.0).epsilon(1e-15));  // at r = R = 1
    }

    SECTION("bessel potential is nonnegative") {
        const PotentialSummary s = summarize(PotentialSpec::bessel_j1_sq(1.0, 1.0), g);
        CHECK(s.V0minus == 0.0);
        CHECK(s.V0plus > 0.0);
    }

    SECTION("V+ V- = 0 nodewise and V = V+ - V-") {
        const PotentialSpec spec = PotentialSpec::tabulated({0.0, 0.4, 1.0}, {-1.0, 2.0, -0.5});
        const PotentialSummary s = summarize(spec, g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(s.Vplus_nodes[i] * s.Vminus_nodes[i] == 0.0);
            CHECK(s.Vplus_nodes[i] - s.Vminus_nodes[i] ==
                  Catch::Approx(evaluate(spec, g.node(i))).margin(1e-15));
        }
        CHECK(s.V0 == std::max(s.V0plus, s.V0minus));
    }
}

TEST_CASE("summarize scales exactly under V -> c V, c > 0") {
    const RadialGrid g = build_grid(2.0, 48);
    const double c = 2.0;  // dyadic so the scaling is exact in floating point

    const PotentialSpec tab = PotentialSpec::tabulated({0.0, 0.7, 2.0}, {-1.25, 3.5, 0.75});
    PotentialSpec tab_scaled = tab;
    for (double& v : tab_scaled.table_v) v *= c;

    const PotentialSummary s1 = summarize(tab, g);
    const PotentialSummary s2 = summarize(tab_scaled, g);
    CHECK(s2.V0plus == c * s1.V0plus);
    CHECK(s2.V0minus == c * s1.V0minus);
    CHECK(s2.V0 == c * s1.V0);
    CHECK(s2.max_r2_Vplus == c * s1.max_r2_Vplus);
}

TEST_CASE("sample_midpoints agrees with evaluate") {
    const RadialGrid g = build_grid(1.0, 17);
    const PotentialSpec spec = PotentialSpec::bessel_j1_sq(1.5, 2.0);
    const std::vector<double> vm = sample_midpoints(spec, g);
    REQUIRE(vm.size() == g.cell_count());
    for (std::size_t j = 0; j + 1 < g.cell_count(); ++j) {
        CHECK(vm[j] == evaluate(spec, g.midpoint(j)));
    }
}
