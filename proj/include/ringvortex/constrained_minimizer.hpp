#pragma once

// Projected gradient descent for min { I(u) : P(u) = P0 }.
//
// The constraint is enforced exactly by rescaling (P is homogeneous
// quadratic), the descent direction is the H-metric Riesz gradient projected
// onto the tangent space of {P = P0}, and nonnegativity is maintained by a
// nodewise absolute value folded into each accepted step. The propagation
// constant is reported from the multiplier relation
//   beta = [ int (r V u^2 + s r u^4) dr - (n^2 int u^2/r + int r u_r^2) ] / int r u^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringvortex/functionals.hpp"
#include "ringvortex/h_metric.hpp"
#include "ringvortex/potentials.hpp"
#include "ringvortex/radial_core.hpp"

namespace ringvortex {

/// Rescales a profile so that P(u) = P0. Exact because P is quadratic.
inline Profile project_power(const RadialGrid& grid, const Profile& u, double P0) {
    if (!(P0 > 0.0)) {
        throw std::invalid_argument("project_power: target power must be positive");
    }
    const double P = beam_power(grid, u);
    if (!(P > 0.0)) {
        throw std::invalid_argument("project_power: zero profile has no projection");
    }
    const double scale = std::sqrt(P0 / P);
    Profile v = u;
    for (double& x : v.values) x *= scale;
    return v;
}

/// Tent comparison profile: linear up to the apex a = R/2 with height b,
/// linear back down to zero at R.
inline Profile tent_profile(const RadialGrid& grid, double b) {
    if (!(b > 0.0)) {
        throw std::invalid_argument("tent_profile: height must be positive");
    }
    const double a = 0.5 * grid.R;
    Profile u = zero_profile(grid);
    for (std::size_t i = 1; i <= grid.N; ++i) {
        const double r = grid.node(i);
        u[i] = (b / a) * std::min(r, grid.R - r);
    }
    return u;
}

/// Propagation constant of a profile via the multiplier relation.
inline double lagrange_beta(const RadialGrid& grid, const Profile& u,
                            std::span<const double> v_mid, int n, int s) {
    check_winding(n);
    check_sign(s);
    const Moments m = moments(grid, u);
    if (!(m.m_ru2 > 0.0)) {
        throw std::invalid_argument("lagrange_beta: profile has zero power");
    }
    const double pv = potential_moment(grid, u, v_mid);
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return (pv + static_cast<double>(s) * m.m_ru4 - (nn * m.m_u2_over_r + m.m_rur2)) /
           m.m_ru2;
}

inline double lagrange_beta(const RadialGrid& grid, const Profile& u,
                            const PotentialSpec& potential, int n, int s) {
    return lagrange_beta(grid, u, sample_midpoints(potential, grid), n, s);
}

struct MinimizeOptions {
    std::size_t max_iters = 200000;
    double grad_tol = 1e-8;    // r-weighted norm of the projected gradient
    double step_init = 1.0;
    double step_shrink = 0.5;
    // Nodewise |u| after each step; defaults to on for s = +1.
    std::optional<bool> enforce_positive;

    void validate() const {
        if (!(grad_tol > 0.0)) throw std::invalid_argument("MinimizeOptions: grad_tol must be > 0");
        if (!(step_init > 0.0)) throw std::invalid_argument("MinimizeOptions: step_init must be > 0");
        if (!(step_shrink > 0.0 && step_shrink < 1.0)) {
            throw std::invalid_argument("MinimizeOptions: step_shrink must be in (0,1)");
        }
        if (max_iters == 0) throw std::invalid_argument("MinimizeOptions: max_iters must be >= 1");
    }
};

struct IterationRecord {
    double action = 0.0;
    double projected_grad_norm = 0.0;
};

struct MinimizeResult {
    Profile profile;
    double beta = 0.0;
    FunctionalValues values;
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> trace;
    std::vector<std::string> warnings;
};

namespace detail {

// One accepted minimizer step: move, rescale onto the constraint, optionally
// take |u| nodewise (which perturbs the discrete power), rescale again.
inline Profile constrained_step(const RadialGrid& grid, const Profile& u,
                                std::span<const double> dir, double alpha, double P0,
                                bool positive) {
    Profile v = u;
    for (std::size_t i = 1; i <= grid.N; ++i) {
        v[i] += alpha * dir[i - 1];
    }
    v = project_power(grid, v, P0);
    if (positive) {
        bool flipped = false;
        for (std::size_t i = 1; i <= grid.N; ++i) {
            if (v[i] < 0.0) {
                v[i] = -v[i];
                flipped = true;
            }
        }
        if (flipped) v = project_power(grid, v, P0);
    }
    return v;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// Minimizes I over {P = P0} starting from the tent comparison profile.
inline MinimizeResult minimize_constrained(const RadialGrid& grid,
                                           const PotentialSpec& potential, int n,
                                           double P0, int s,
                                           const MinimizeOptions& opts = {}) {
    check_winding(n);
    check_sign(s);
    opts.validate();
    if (!(P0 > 0.0) || !std::isfinite(P0)) {
        throw std::invalid_argument("minimize_constrained: P0 must be positive and finite");
    }

    MinimizeResult res;
    const double power_cap = 2.0 * two_pi * std::abs(n);  // 4 pi |n|
    if (s == +1 && P0 >= power_cap) {
        res.warnings.push_back("outside Theorem 1 regime: P0 >= 4*pi*|n|");
    }

    const std::vector<double> v_mid = sample_midpoints(potential, grid);
    const bool positive = opts.enforce_positive.value_or(s == +1);

    const double a = 0.5 * grid.R;
    const double b0 = std::sqrt(3.0 * P0 / (2.0 * two_pi * a * a));
    Profile u = project_power(grid, tent_profile(grid, b0), P0);

    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const HMetric H(grid, nn);
    const double c1 = 1e-4;           // Armijo slope fraction
    const std::size_t max_shrinks = 60;

    double alpha_prev = opts.step_init;
    bool grew_last = true;  // permit the first trial at step_init
    double best_pg = std::numeric_limits<double>::infinity();
    std::size_t best_pg_iter = 0;
    double I0 = eval_action(grid, u, v_mid, n, s);
    bool stalled = false;

    res.trace.reserve(std::min<std::size_t>(opts.max_iters + 1, 4096));

    std::size_t iter = 0;
    for (;; ++iter) {
        const std::vector<double> g = action_gradient(grid, u, v_mid, n, s);
        const std::vector<double> phi = power_gradient(grid, u);

        // r-weighted Riesz representatives and tangent projection along the
        // discrete power gradient (the continuum direction u, realized on the
        // discrete functional so the multiplier identity is exact).
        std::vector<double> G = r_weighted_riesz(grid, g);
        std::vector<double> Phi = r_weighted_riesz(grid, phi);
        const double gphi = r_weighted_inner(grid, G, Phi);
        const double phiphi = r_weighted_inner(grid, Phi, Phi);
        std::vector<double> Gproj = G;
        for (std::size_t i = 0; i < grid.N; ++i) {
            Gproj[i] -= (gphi / phiphi) * Phi[i];
        }
        const double pg_norm = r_weighted_norm(grid, Gproj);
        res.trace.push_back({I0, pg_norm});

        if (pg_norm <= opts.grad_tol) {
            res.converged = true;
            break;
        }
        if (iter >= opts.max_iters || stalled) {
            break;
        }
        if (pg_norm < 0.999 * best_pg) {
            best_pg = pg_norm;
            best_pg_iter = iter;
        } else if (iter - best_pg_iter > 100) {
            // Gradient plateau: the current step straddles a stability edge,
            // so damp it.
            alpha_prev = std::max(alpha_prev * opts.step_shrink, 1e-13 * opts.step_init);
            best_pg_iter = iter;
        }

        // H-metric descent direction, tangent to the constraint.
        const std::vector<double> GH = H.solve(g);
        const std::vector<double> PH = H.solve(phi);
        const double lam = detail::dot(GH, phi) / detail::dot(PH, phi);
        std::vector<double> dir(grid.N);
        for (std::size_t i = 0; i < grid.N; ++i) {
            dir[i] = -(GH[i] - lam * PH[i]);
        }
        const double slope = detail::dot(g, dir);

        // Backtracking with a floating-point slack: near convergence the true
        // decrease falls below summation noise and must not stall the run.
        // The step only regrows after a measurable decrease, otherwise a step
        // at the edge of stability would cycle inside the slack forever.
        const double fp_slack =
            1024.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(I0));
        double alpha = grew_last ? std::min(opts.step_init, alpha_prev / opts.step_shrink)
                                 : alpha_prev;
        bool accepted = false;
        for (std::size_t k = 0; k < max_shrinks; ++k) {
            Profile v = detail::constrained_step(grid, u, dir, alpha, P0, positive);
            const double I1 = eval_action(grid, v, v_mid, n, s);
            if (I1 <= I0 + c1 * alpha * slope + fp_slack) {
                grew_last = (I0 - I1) > fp_slack;
                u = std::move(v);
                I0 = I1;
                alpha_prev = alpha;
                accepted = true;
                break;
            }
            alpha *= opts.step_shrink;
        }
        if (!accepted) {
            stalled = true;  // one more pass to record the final gradient norm
        }
    }

    res.iterations = iter;
    res.profile = std::move(u);
    res.beta = lagrange_beta(grid, res.profile, v_mid, n, s);
    res.values = eval_functionals(grid, res.profile, v_mid, n, s, res.beta, true);
    res.residual_norm = el_residual(grid, res.profile, v_mid, n, res.beta, s).norm;
    if (stalled && !res.converged) {
        res.warnings.push_back("line search stalled before reaching grad_tol");
    }
    return res;
}

} // namespace ringvortex
