#pragma once

// Radial grid, staggered differentiation, and weighted quadrature for the
// measures r*dr, dr/r and r*( . )^4 used by all functionals in this library.
//
// Discretization: uniform nodes r_i = i*h on [0,R] with h = R/(N+1); profile
// values live on nodes with pinned endpoints u(0) = u(R) = 0; derivatives live
// on cell midpoints. Integrals are midpoint sums over cells, with the field
// evaluated as the cell average. The integrand u^2/r is therefore never
// evaluated at r = 0.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace ringvortex {

namespace detail {

// Neumaier compensated accumulator. Quadrature sums feed line searches that
// must resolve decreases near machine precision, so plain summation noise
// (~N*eps) is not acceptable.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace detail

/// Uniform discretization of [0, R] with N interior nodes.
struct RadialGrid {
    double R = 0.0;       // outer radius, > 0
    std::size_t N = 0;    // interior node count, >= 2
    double h = 0.0;       // spacing R/(N+1)
    std::vector<double> nodes;  // r_i = i*h, i = 0..N+1

    std::size_t node_count() const { return N + 2; }
    std::size_t cell_count() const { return N + 1; }
    double node(std::size_t i) const { return nodes[i]; }
    double midpoint(std::size_t j) const { return (static_cast<double>(j) + 0.5) * h; }
};

inline RadialGrid build_grid(double R, std::size_t N) {
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("build_grid: outer radius must be positive and finite");
    }
    if (N < 2) {
        throw std::invalid_argument("build_grid: need at least 2 interior nodes");
    }
    RadialGrid g;
    g.R = R;
    g.N = N;
    g.h = R / static_cast<double>(N + 1);
    g.nodes.resize(N + 2);
    for (std::size_t i = 0; i <= N + 1; ++i) {
        g.nodes[i] = static_cast<double>(i) * g.h;
    }
    g.nodes[N + 1] = R;  // exact endpoint
    return g;
}

/// Nodal values of the radial profile u(r), endpoints pinned to zero.
struct Profile {
    std::vector<double> values;  // size N+2, values[0] = values[N+1] = 0

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::size_t size() const { return values.size(); }
};

inline Profile zero_profile(const RadialGrid& grid) {
    Profile p;
    p.values.assign(grid.node_count(), 0.0);
    return p;
}

/// Builds a profile from nodal values; endpoints are forced to zero and all
/// values must be finite.
inline Profile make_profile(const RadialGrid& grid, std::vector<double> values) {
    if (values.size() != grid.node_count()) {
        throw std::invalid_argument("make_profile: value count does not match grid");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("make_profile: nonfinite value");
        }
    }
    values.front() = 0.0;
    values.back() = 0.0;
    Profile p;
    p.values = std::move(values);
    return p;
}

inline void check_on_grid(const RadialGrid& grid, const Profile& u, const char* where) {
    if (u.size() != grid.node_count()) {
        throw std::invalid_argument(std::string(where) + ": profile does not match grid");
    }
}

/// Difference quotients (u_{j+1} - u_j)/h at the N+1 cell midpoints.
inline std::vector<double> derivative_midpoints(const RadialGrid& grid, const Profile& u) {
    check_on_grid(grid, u, "derivative_midpoints");
    std::vector<double> d(grid.cell_count());
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        d[j] = (u[j + 1] - u[j]) / grid.h;
    }
    return d;
}

/// The four quadrature values entering every functional.
struct Moments {
    double m_ru2 = 0.0;       // int r u^2 dr
    double m_rur2 = 0.0;      // int r u_r^2 dr
    double m_u2_over_r = 0.0; // int u^2 / r dr
    double m_ru4 = 0.0;       // int r u^4 dr
};

inline Moments moments(const RadialGrid& grid, const Profile& u) {
    check_on_grid(grid, u, "moments");
    detail::CompensatedSum s_ru2, s_rur2, s_u2r, s_ru4;
    const double h = grid.h;
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        const double rm = grid.midpoint(j);
        const double um = 0.5 * (u[j] + u[j + 1]);
        const double du = (u[j + 1] - u[j]) / h;
        const double um2 = um * um;
        s_ru2.add(h * rm * um2);
        s_rur2.add(h * rm * du * du);
        s_u2r.add(h * um2 / rm);
        s_ru4.add(h * rm * um2 * um2);
    }
    Moments m;
    m.m_ru2 = s_ru2.value();
    m.m_rur2 = s_rur2.value();
    m.m_u2_over_r = s_u2r.value();
    m.m_ru4 = s_ru4.value();
    return m;
}

/// Squared H-norm int (r u_r^2 + u^2/r) dr, the natural norm for radial
/// profiles vanishing at the origin.
inline double h_norm_sq(const RadialGrid& grid, const Profile& u) {
    const Moments m = moments(grid, u);
    return m.m_rur2 + m.m_u2_over_r;
}

} // namespace ringvortex
