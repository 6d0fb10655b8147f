#pragma once

// External potential V(r): symbolic descriptions, pointwise evaluation, and
// the positive/negative-part decomposition V = V+ - V- with the extremal
// constants used by the propagation-constant bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringvortex/radial_core.hpp"

namespace ringvortex {

enum class PotentialKind { zero, constant, bessel_j1_sq, tabulated };

/// Symbolic description of V(r).
///   zero          V = 0
///   constant      V = value
///   bessel_j1_sq  V = p * J1(b r)^2
///   tabulated     piecewise-linear through (r_k, V_k), covering the domain
struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    double value = 0.0;  // constant
    double p = 1.0;      // bessel amplitude
    double b = 1.0;      // bessel frequency
    std::vector<double> table_r;
    std::vector<double> table_v;

    static PotentialSpec zero() { return {}; }
    static PotentialSpec constant(double v) {
        PotentialSpec s;
        s.kind = PotentialKind::constant;
        s.value = v;
        return s;
    }
    static PotentialSpec bessel_j1_sq(double p, double b) {
        if (!(p > 0.0) || !(b > 0.0)) {
            throw std::invalid_argument("bessel_j1_sq: parameters must be positive");
        }
        PotentialSpec s;
        s.kind = PotentialKind::bessel_j1_sq;
        s.p = p;
        s.b = b;
        return s;
    }
    static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v) {
        if (r.size() != v.size() || r.size() < 2) {
            throw std::invalid_argument("tabulated: need matching r/V lists with >= 2 rows");
        }
        for (std::size_t k = 0; k + 1 < r.size(); ++k) {
            if (!(r[k] < r[k + 1])) {
                throw std::invalid_argument("tabulated: radii must be strictly increasing");
            }
        }
        if (!(r.front() <= 0.0)) {
            throw std::invalid_argument("tabulated: table must start at r = 0");
        }
        PotentialSpec s;
        s.kind = PotentialKind::tabulated;
        s.table_r = std::move(r);
        s.table_v = std::move(v);
        return s;
    }
};

inline double evaluate(const PotentialSpec& spec, double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw std::invalid_argument("potential evaluate: r must be finite and >= 0");
    }
    switch (spec.kind) {
        case PotentialKind::zero:
            return 0.0;
        case PotentialKind::constant:
            return spec.value;
        case PotentialKind::bessel_j1_sq: {
            const double j1 = std::cyl_bessel_j(1, spec.b * r);
            return spec.p * j1 * j1;
        }
        case PotentialKind::tabulated: {
            const auto& rs = spec.table_r;
            const auto& vs = spec.table_v;
            if (r > rs.back() * (1.0 + 1e-12)) {
                throw std::invalid_argument("potential evaluate: r outside tabulated range");
            }
            if (r >= rs.back()) return vs.back();
            const auto it = std::upper_bound(rs.begin(), rs.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - rs.begin()) - 1;
            const double t = (r - rs[k]) / (rs[k + 1] - rs[k]);
            return vs[k] + t * (vs[k + 1] - vs[k]);
        }
    }
    throw std::logic_error("potential evaluate: unknown kind");
}

/// Nodewise decomposition V = V+ - V- plus the extrema over grid nodes.
struct PotentialSummary {
    std::vector<double> Vplus_nodes;
    std::vector<double> Vminus_nodes;
    double V0plus = 0.0;        // max V+
    double V0minus = 0.0;       // max V-
    double V0 = 0.0;            // max |V| = max(V0plus, V0minus)
    double max_r2_Vplus = 0.0;  // max r^2 V+(r)
};

inline PotentialSummary summarize(const PotentialSpec& spec, const RadialGrid& grid) {
    PotentialSummary s;
    s.Vplus_nodes.resize(grid.node_count());
    s.Vminus_nodes.resize(grid.node_count());
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const double r = grid.node(i);
        const double v = evaluate(spec, r);
        const double vp = v > 0.0 ? v : 0.0;
        const double vm = v < 0.0 ? -v : 0.0;
        s.Vplus_nodes[i] = vp;
        s.Vminus_nodes[i] = vm;
        s.V0plus = std::max(s.V0plus, vp);
        s.V0minus = std::max(s.V0minus, vm);
        s.max_r2_Vplus = std::max(s.max_r2_Vplus, r * r * vp);
    }
    s.V0 = std::max(s.V0plus, s.V0minus);
    return s;
}

/// Potential sampled at the quadrature midpoints of a grid. Solvers evaluate
/// V there on every iteration, so the sampling is done once.
inline std::vector<double> sample_midpoints(const PotentialSpec& spec, const RadialGrid& grid) {
    std::vector<double> vm(grid.cell_count());
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        vm[j] = evaluate(spec, std::min(grid.midpoint(j), grid.R));
    }
    return vm;
}

inline std::string describe(const PotentialSpec& spec) {
    switch (spec.kind) {
        case PotentialKind::zero:
            return "zero";
        case PotentialKind::constant:
            return "constant " + std::to_string(spec.value);
        case PotentialKind::bessel_j1_sq:
            return "bessel_j1_sq " + std::to_string(spec.p) + " " + std::to_string(spec.b);
        case PotentialKind::tabulated:
            return "tabulated (" + std::to_string(spec.table_r.size()) + " rows)";
    }
    return "?";
}

} // namespace ringvortex
