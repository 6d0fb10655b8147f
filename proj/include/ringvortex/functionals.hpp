#pragma once

// Action, power and energy functionals of the radial profile, their exact
// discrete gradients, and the Euler-Lagrange residual of
//
//   (r u_r)_r - (n^2/r) u + r (V + s u^2) u = beta r u,   u(0) = u(R) = 0.
//
// Everything is differentiated after discretization: the gradient returned
// here is the exact derivative of the midpoint-quadrature functional, so the
// residual (the negative gradient of the prescribed-beta action under the
// fixed nodal weight h) vanishes exactly when a solver has converged.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringvortex/potentials.hpp"
#include "ringvortex/radial_core.hpp"

namespace ringvortex {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline void check_winding(int n) {
    if (n == 0) {
        throw std::invalid_argument("winding number must be a nonzero integer");
    }
}

inline void check_sign(int s) {
    if (s != 1 && s != -1) {
        throw std::invalid_argument("nonlinearity sign must be +1 or -1");
    }
}

/// int r V u^2 dr with V given at cell midpoints.
inline double potential_moment(const RadialGrid& grid, const Profile& u,
                               std::span<const double> v_mid) {
    check_on_grid(grid, u, "potential_moment");
    detail::CompensatedSum s;
    const double h = grid.h;
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        const double um = 0.5 * (u[j] + u[j + 1]);
        s.add(h * grid.midpoint(j) * v_mid[j] * um * um);
    }
    return s.value();
}

/// Beam power P = 2 pi int r u^2 dr.
inline double beam_power(const RadialGrid& grid, const Profile& u) {
    return two_pi * moments(grid, u).m_ru2;
}

/// Action I(u) = 1/2 int { r u_r^2 + (n^2/r) u^2 - r V u^2 - s (r/2) u^4 } dr.
inline double eval_action(const RadialGrid& grid, const Profile& u,
                          std::span<const double> v_mid, int n, int s) {
    check_winding(n);
    check_sign(s);
    check_on_grid(grid, u, "eval_action");
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    detail::CompensatedSum acc;
    const double h = grid.h;
    const double sq = 0.25 * static_cast<double>(s);
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        const double rm = grid.midpoint(j);
        const double um = 0.5 * (u[j] + u[j + 1]);
        const double du = (u[j + 1] - u[j]) / h;
        const double um2 = um * um;
        acc.add(0.5 * h * (rm * du * du + nn * um2 / rm - rm * v_mid[j] * um2) -
                sq * h * rm * um2 * um2);
    }
    return acc.value();
}

inline double eval_action(const RadialGrid& grid, const Profile& u,
                          const PotentialSpec& potential, int n, int s) {
    return eval_action(grid, u, sample_midpoints(potential, grid), n, s);
}

/// Prescribed-beta action I_beta(u) = I(u) with V replaced by V - beta
/// (focusing sign), i.e. 1/2 int { r u_r^2 + (n^2/r) u^2 + (beta - V) r u^2
/// - (r/2) u^4 } dr.
inline double eval_action_beta(const RadialGrid& grid, const Profile& u,
                               std::span<const double> v_mid, int n, double beta) {
    check_winding(n);
    check_on_grid(grid, u, "eval_action_beta");
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    detail::CompensatedSum acc;
    const double h = grid.h;
    for (std::size_t j = 0; j < grid.cell_count(); ++j) {
        const double rm = grid.midpoint(j);
        const double um = 0.5 * (u[j] + u[j + 1]);
        const double du = (u[j + 1] - u[j]) / h;
        const double um2 = um * um;
        acc.add(0.5 * h *
                (rm * du * du + nn * um2 / rm + (beta - v_mid[j]) * rm * um2 -
                 0.5 * rm * um2 * um2));
    }
    return acc.value();
}

inline double eval_action_beta(const RadialGrid& grid, const Profile& u,
                               const PotentialSpec& potential, int n, double beta) {
    return eval_action_beta(grid, u, sample_midpoints(potential, grid), n, beta);
}

struct FunctionalValues {
    double I = 0.0;      // action at the given sign s
    double P = 0.0;      // beam power
    double E = 0.0;      // energy 1/2 int { r u_r^2 + u^2/r + (r/2) u^4 } dr
    double Ibeta = 0.0;  // prescribed-beta action, meaningful when has_beta
    bool has_beta = false;
};

inline FunctionalValues eval_functionals(const RadialGrid& grid, const Profile& u,
                                         std::span<const double> v_mid, int n, int s,
                                         double beta, bool has_beta) {
    check_winding(n);
    check_sign(s);
    const Moments m = moments(grid, u);
    const double pv = potential_moment(grid, u, v_mid);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    FunctionalValues f;
    f.P = two_pi * m.m_ru2;
    f.I = 0.5 * (m.m_rur2 + nn * m.m_u2_over_r - pv - 0.5 * s * m.m_ru4);
    f.E = 0.5 * (m.m_rur2 + m.m_u2_over_r + 0.5 * m.m_ru4);
    f.has_beta = has_beta;
    if (has_beta) {
        f.Ibeta = 0.5 * (m.m_rur2 + nn * m.m_u2_over_r + (beta * m.m_ru2 - pv) -
                         0.5 * s * m.m_ru4);
    }
    return f;
}

// --- exact discrete gradients -------------------------------------------
//
// Gradients are cotangent vectors over the interior nodes i = 1..N (the
// pinned endpoints carry no degree of freedom): component i is the partial
// derivative of the functional with respect to u_i, and <g, v> = sum g_i v_i
// is the directional derivative along any interior perturbation v.

/// d/du_i of int r u^2 dr.
inline std::vector<double> grad_m_ru2(const RadialGrid& grid, const Profile& u) {
    check_on_grid(grid, u, "grad_m_ru2");
    std::vector<double> g(grid.N);
    const double h = grid.h;
    for (std::size_t i = 1; i <= grid.N; ++i) {
        const double um_l = 0.5 * (u[i - 1] + u[i]);
        const double um_r = 0.5 * (u[i] + u[i + 1]);
        g[i - 1] = h * (grid.midpoint(i - 1) * um_l + grid.midpoint(i) * um_r);
    }
    return g;
}

/// Gradient of the power functional P = 2 pi int r u^2 dr.
inline std::vector<double> power_gradient(const RadialGrid& grid, const Profile& u) {
    std::vector<double> g = grad_m_ru2(grid, u);
    for (double& x : g) x *= two_pi;
    return g;
}

/// Gradient of I_beta at sign s; beta = 0 recovers the gradient of I.
inline std::vector<double> action_beta_gradient(const RadialGrid& grid, const Profile& u,
                                                std::span<const double> v_mid, int n,
                                                double beta, int s) {
    check_winding(n);
    check_sign(s);
    check_on_grid(grid, u, "action_beta_gradient");
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double h = grid.h;
    const double sd = static_cast<double>(s);
    std::vector<double> g(grid.N);
    for (std::size_t i = 1; i <= grid.N; ++i) {
        const double rm_l = grid.midpoint(i - 1);
        const double rm_r = grid.midpoint(i);
        const double um_l = 0.5 * (u[i - 1] + u[i]);
        const double um_r = 0.5 * (u[i] + u[i + 1]);
        const double d_l = (u[i] - u[i - 1]) / h;
        const double d_r = (u[i + 1] - u[i]) / h;
        g[i - 1] = (rm_l * d_l - rm_r * d_r) +
                   0.5 * h * nn * (um_l / rm_l + um_r / rm_r) +
                   0.5 * h *
                       ((beta - v_mid[i - 1]) * rm_l * um_l +
                        (beta - v_mid[i]) * rm_r * um_r) -
                   0.5 * h * sd * (rm_l * um_l * um_l * um_l + rm_r * um_r * um_r * um_r);
    }
    return g;
}

/// Gradient of the action I at sign s.
inline std::vector<double> action_gradient(const RadialGrid& grid, const Profile& u,
                                           std::span<const double> v_mid, int n, int s) {
    return action_beta_gradient(grid, u, v_mid, n, 0.0, s);
}

inline std::vector<double> action_gradient(const RadialGrid& grid, const Profile& u,
                                           const PotentialSpec& potential, int n, int s) {
    return action_gradient(grid, u, sample_midpoints(potential, grid), n, s);
}

inline std::vector<double> action_beta_gradient(const RadialGrid& grid, const Profile& u,
                                                const PotentialSpec& potential, int n,
                                                double beta, int s = +1) {
    return action_beta_gradient(grid, u, sample_midpoints(potential, grid), n, beta, s);
}

/// Euler-Lagrange residual at the interior nodes, with its discrete L2(dr)
/// norm sqrt(sum h res_i^2). Realized as -gradient(I_beta)/h so that solver
/// convergence and residual smallness are the same statement.
struct ElResidual {
    std::vector<double> values;
    double norm = 0.0;
};

inline ElResidual el_residual(const RadialGrid& grid, const Profile& u,
                              std::span<const double> v_mid, int n, double beta, int s) {
    ElResidual r;
    r.values = action_beta_gradient(grid, u, v_mid, n, beta, s);
    detail::CompensatedSum nrm;
    for (double& x : r.values) {
        x = -x / grid.h;
        nrm.add(grid.h * x * x);
    }
    r.norm = std::sqrt(nrm.value());
    return r;
}

inline ElResidual el_residual(const RadialGrid& grid, const Profile& u,
                              const PotentialSpec& potential, int n, double beta, int s) {
    return el_residual(grid, u, sample_midpoints(potential, grid), n, beta, s);
}

// --- nodal inner products -------------------------------------------------

/// r-weighted inner product of nodal vectors over interior nodes,
/// sum h r_i a_i b_i (the discrete L2(r dr) pairing).
inline double r_weighted_inner(const RadialGrid& grid, std::span<const double> a,
                               std::span<const double> b) {
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < grid.N; ++i) {
        s.add(grid.h * grid.node(i + 1) * a[i] * b[i]);
    }
    return s.value();
}

inline double r_weighted_norm(const RadialGrid& grid, std::span<const double> a) {
    return std::sqrt(r_weighted_inner(grid, a, a));
}

/// Riesz representative of a cotangent vector in the r-weighted pairing:
/// G_i = g_i / (h r_i).
inline std::vector<double> r_weighted_riesz(const RadialGrid& grid,
                                            std::span<const double> g) {
    std::vector<double> G(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) {
        G[i] = g[i] / (grid.h * grid.node(i + 1));
    }
    return G;
}

} // namespace ringvortex
