#pragma once

// Min-max search for a nontrivial critical point of I_beta at prescribed
// beta: a discretized path from the zero profile to a low-action endpoint is
// deformed by descent steps at its maximal knot until the gradient there
// vanishes. The path maximum is non-increasing by construction, and any
// nontrivial critical point of I_beta with beta >= V0+ has level at least
// 1/(8 R^2), which is checked on the converged value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringvortex/constrained_minimizer.hpp"
#include "ringvortex/functionals.hpp"
#include "ringvortex/h_metric.hpp"
#include "ringvortex/potentials.hpp"
#include "ringvortex/radial_core.hpp"

namespace ringvortex {

/// Discretized path g(t_k), t_k = k/(M-1), with g(0) = 0 and g(1) = u0 fixed.
struct PathState {
    std::vector<Profile> knots;
    std::vector<double> values;  // I_beta at each knot
    std::size_t max_index = 0;

    void locate_max() {
        max_index = 0;
        for (std::size_t k = 1; k < values.size(); ++k) {
            if (values[k] > values[max_index]) max_index = k;  // ties keep lowest index
        }
    }
    double max_value() const { return values[max_index]; }
};

/// Tent endpoint with b large enough that I_beta(u0) < 0, per the closed-form
/// sufficient bound b^2 >= (10/a^2) (1 + n^2 (2 ln2 - 1) + (a^2/3)(beta + V0-) + 1),
/// verified numerically and doubled until the sign condition holds.
inline Profile choose_endpoint(const RadialGrid& grid, const PotentialSpec& potential,
                               int n, double beta) {
    check_winding(n);
    const std::vector<double> v_mid = sample_midpoints(potential, grid);
    const double v0minus = summarize(potential, grid).V0minus;
    const double a = 0.5 * grid.R;
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double c = 1.0 + nn * (2.0 * std::numbers::ln2 - 1.0) +
                     (a * a / 3.0) * (beta + v0minus);
    double b = std::sqrt(std::max((10.0 / (a * a)) * (c + 1.0), 1.0));
    for (int doublings = 0; doublings <= 60; ++doublings) {
        Profile u0 = tent_profile(grid, b);
        if (eval_action_beta(grid, u0, v_mid, n, beta) < 0.0) {
            return u0;
        }
        b *= 2.0;
    }
    throw std::runtime_error(
        "choose_endpoint: failed to reach I_beta < 0 after 60 doublings");
}

/// Straight-line initial path t -> t*u0 with M knots.
inline PathState make_straight_path(const RadialGrid& grid, std::span<const double> v_mid,
                                    int n, double beta, const Profile& u0, std::size_t M) {
    if (M < 3) throw std::invalid_argument("path needs at least 3 knots");
    PathState path;
    path.knots.resize(M);
    path.values.resize(M);
    for (std::size_t k = 0; k < M; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(M - 1);
        Profile g = u0;
        for (double& x : g.values) x *= t;
        path.values[k] = eval_action_beta(grid, g, v_mid, n, beta);
        path.knots[k] = std::move(g);
    }
    path.locate_max();
    return path;
}

struct MountainPassOptions {
    std::size_t M = 41;             // path knot count
    std::size_t max_iters = 500000;
    double grad_tol = 1e-6;         // r-weighted gradient norm at the maximal knot
    double step = 1.0;

    void validate() const {
        if (M < 3) throw std::invalid_argument("MountainPassOptions: M must be >= 3");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("MountainPassOptions: grad_tol must be > 0");
        if (!(step > 0.0)) throw std::invalid_argument("MountainPassOptions: step must be > 0");
        if (max_iters == 0) throw std::invalid_argument("MountainPassOptions: max_iters must be >= 1");
    }
};

struct MountainPassResult {
    Profile profile;
    double level = 0.0;  // I_beta at the returned profile
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    PathState path;  // final path state
    std::vector<IterationRecord> trace;  // (path max, gradient norm at max knot)
    std::vector<std::size_t> retension_iters;  // iterations after which the path was resampled
    std::vector<std::string> warnings;
};

/// Lower bound every nontrivial critical value of I_beta must satisfy.
inline double mp_level_floor(double R) { return 1.0 / (8.0 * R * R); }

inline bool mp_level_check(double c, double R) {
    return c >= mp_level_floor(R) - 1e-9;
}

namespace detail {

// Tridiagonal solve with partial pivoting. The Jacobian at a saddle is
// indefinite, so the SPD factorization of HMetric does not apply.
inline bool solve_tridiagonal_pivoting(std::vector<double> lo, std::vector<double> di,
                                       std::vector<double> up, std::vector<double>& x) {
    const std::size_t n = di.size();
    std::vector<double> up2(n, 0.0);  // second superdiagonal fill-in
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lo[i]) > std::abs(di[i])) {
            std::swap(di[i], lo[i]);
            std::swap(up[i], di[i + 1]);
            std::swap(up2[i], up[i + 1]);
            std::swap(x[i], x[i + 1]);
        }
        if (di[i] == 0.0) return false;
        const double m = lo[i] / di[i];
        di[i + 1] -= m * up[i];
        up[i + 1] -= m * up2[i];
        x[i + 1] -= m * x[i];
    }
    if (di[n - 1] == 0.0) return false;
    for (std::size_t i = n; i-- > 0;) {
        double v = x[i];
        if (i + 1 < n) v -= up[i] * x[i + 1];
        if (i + 2 < n) v -= up2[i] * x[i + 2];
        x[i] = v / di[i];
        if (!std::isfinite(x[i])) return false;
    }
    return true;
}

// Tridiagonal Jacobian of the discrete gradient of I_beta (s = +1).
inline void action_beta_jacobian(const RadialGrid& grid, const Profile& u,
                                 std::span<const double> v_mid, int n, double beta,
                                 std::vector<double>& lo, std::vector<double>& di,
                                 std::vector<double>& up) {
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const double h = grid.h;
    lo.assign(grid.N, 0.0);
    di.assign(grid.N, 0.0);
    up.assign(grid.N, 0.0);
    for (std::size_t i = 1; i <= grid.N; ++i) {
        const double rm_l = grid.midpoint(i - 1);
        const double rm_r = grid.midpoint(i);
        const double um_l = 0.5 * (u[i - 1] + u[i]);
        const double um_r = 0.5 * (u[i] + u[i + 1]);
        di[i - 1] = (rm_l + rm_r) / h + 0.25 * h * nn * (1.0 / rm_l + 1.0 / rm_r) +
                    0.25 * h *
                        ((beta - v_mid[i - 1]) * rm_l + (beta - v_mid[i]) * rm_r) -
                    0.75 * h * (rm_l * um_l * um_l + rm_r * um_r * um_r);
        if (i < grid.N) {
            up[i - 1] = -rm_r / h + 0.25 * h * nn / rm_r +
                        0.25 * h * (beta - v_mid[i]) * rm_r -
                        0.75 * h * rm_r * um_r * um_r;
            lo[i - 1] = up[i - 1];  // symmetric
        }
    }
}

// Newton iteration on grad I_beta = 0 from a near-critical start. Returns the
// critical point when the r-weighted gradient norm reaches tol, otherwise
// nothing.
inline std::optional<Profile> newton_polish(const RadialGrid& grid,
                                            std::span<const double> v_mid, int n,
                                            double beta, const Profile& start,
                                            double tol) {
    Profile u = start;
    std::vector<double> lo, di, up;
    for (int it = 0; it < 60; ++it) {
        std::vector<double> g = action_beta_gradient(grid, u, v_mid, n, beta, +1);
        const double pg = r_weighted_norm(grid, r_weighted_riesz(grid, g));
        if (pg <= tol) return u;
        action_beta_jacobian(grid, u, v_mid, n, beta, lo, di, up);
        std::vector<double> delta = g;
        for (double& x : delta) x = -x;
        if (!solve_tridiagonal_pivoting(lo, di, up, delta)) return std::nullopt;
        double unorm = 0.0, dnorm = 0.0;
        for (std::size_t i = 1; i <= grid.N; ++i) {
            unorm = std::max(unorm, std::abs(u[i]));
            dnorm = std::max(dnorm, std::abs(delta[i - 1]));
        }
        const double cap = 0.5 * unorm + 1e-3;
        const double scale = dnorm > cap ? cap / dnorm : 1.0;
        for (std::size_t i = 1; i <= grid.N; ++i) {
            u[i] += scale * delta[i - 1];
            if (!std::isfinite(u[i])) return std::nullopt;
        }
    }
    return std::nullopt;
}

} // namespace detail

inline MountainPassResult mountain_pass_solve(const RadialGrid& grid,
                                              const PotentialSpec& potential, int n,
                                              double beta,
                                              const MountainPassOptions& opts = {}) {
    check_winding(n);
    opts.validate();

    const std::vector<double> v_mid = sample_midpoints(potential, grid);
    MountainPassResult res;

    const Profile u0 = choose_endpoint(grid, potential, n, beta);
    PathState path = make_straight_path(grid, v_mid, n, beta, u0, opts.M);

    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const HMetric H(grid, nn);
    const double step_shrink = 0.5;
    const double c1 = 1e-4;
    const std::size_t max_shrinks = 60;
    const std::size_t retension_every = 5;
    const double polish_tol = std::max(1e-13, 0.01 * opts.grad_tol);

    res.trace.reserve(std::min<std::size_t>(opts.max_iters + 1, 4096));

    // Spec re-tension: local convex averaging of the interior knots, accepted
    // only if it does not raise the path maximum.
    auto average_knots = [&](PathState& p) {
        const double old_max = *std::max_element(p.values.begin(), p.values.end());
        std::vector<Profile> knots = p.knots;
        std::vector<double> values = p.values;
        for (std::size_t m = 1; m + 1 < knots.size(); ++m) {
            Profile w = p.knots[m];
            for (std::size_t i = 1; i <= grid.N; ++i) {
                w[i] = 0.5 * p.knots[m][i] +
                       0.25 * (p.knots[m - 1][i] + p.knots[m + 1][i]);
            }
            values[m] = eval_action_beta(grid, w, v_mid, n, beta);
            knots[m] = std::move(w);
        }
        const double new_max = *std::max_element(values.begin(), values.end());
        if (new_max <= old_max + 1e-12) {
            p.knots = std::move(knots);
            p.values = std::move(values);
            return true;
        }
        return false;
    };

    // Arc-length resampling of the polyline in the H metric. The path is
    // unchanged as a curve; only its knot placement moves. Without this,
    // descent drains the knots into the two basins and the ridge crossing
    // falls inside a single long segment where no knot sees it.
    auto redistribute = [&](PathState& p) {
        const std::size_t M = p.knots.size();
        std::vector<double> cum(M, 0.0);
        for (std::size_t m = 0; m + 1 < M; ++m) {
            Profile diff = p.knots[m + 1];
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= p.knots[m][i];
            cum[m + 1] = cum[m] + std::sqrt(h_norm_sq(grid, diff));
        }
        const double total = cum[M - 1];
        if (!(total > 0.0)) return;
        std::vector<Profile> knots = p.knots;
        std::size_t seg = 0;
        for (std::size_t k = 1; k + 1 < M; ++k) {
            const double target =
                total * static_cast<double>(k) / static_cast<double>(M - 1);
            while (seg + 2 < M && cum[seg + 1] < target) ++seg;
            const double len = cum[seg + 1] - cum[seg];
            const double t = len > 0.0 ? (target - cum[seg]) / len : 0.0;
            Profile w = p.knots[seg];
            for (std::size_t i = 0; i < w.size(); ++i) {
                w[i] = (1.0 - t) * p.knots[seg][i] + t * p.knots[seg + 1][i];
            }
            knots[k] = std::move(w);
        }
        p.knots = std::move(knots);
        for (std::size_t k = 1; k + 1 < M; ++k) {
            p.values[k] = eval_action_beta(grid, p.knots[k], v_mid, n, beta);
        }
    };

    bool gave_up = false;
    double alpha_prev = opts.step;
    bool grew_last = true;
    double best_pg = std::numeric_limits<double>::infinity();
    std::size_t best_pg_iter = 0;
    std::size_t accepted_steps = 0;
    std::size_t last_polish_iter = 0;
    std::size_t iter = 0;
    for (;; ++iter) {
        path.locate_max();
        const std::size_t k = path.max_index;
        if (k == 0 || k + 1 == path.knots.size()) {
            res.warnings.push_back("path degenerated: maximum moved to an endpoint");
            break;
        }
        const std::vector<double> g =
            action_beta_gradient(grid, path.knots[k], v_mid, n, beta, +1);
        const double pg_norm = r_weighted_norm(grid, r_weighted_riesz(grid, g));
        res.trace.push_back({path.max_value(), pg_norm});

        if (pg_norm <= opts.grad_tol) {
            res.converged = true;
            break;
        }
        if (iter >= opts.max_iters || gave_up) {
            break;
        }
        if (pg_norm < 0.999 * best_pg) {
            best_pg = pg_norm;
            best_pg_iter = iter;
        } else if (iter - best_pg_iter > 2000) {
            gave_up = true;  // one more pass records the final gradient norm
            continue;
        } else if ((iter - best_pg_iter) % 200 == 199) {
            alpha_prev = std::max(alpha_prev * step_shrink, 1e-13 * opts.step);
        }

        // Deformation alone cannot converge onto a saddle (descent is
        // repelled from it), so once the path maximum plateaus, finish the
        // crest with a damped Newton iteration on the gradient. The polished
        // knot replaces the crest; the stopping check above then sees it.
        const std::size_t lookback = 10;
        const bool plateaued =
            res.trace.size() > lookback &&
            res.trace[res.trace.size() - 1 - lookback].action - path.max_value() <=
                1e-3 * (1.0 + std::abs(path.max_value()));
        if (plateaued && iter - last_polish_iter >= 25) {
            last_polish_iter = iter;
            const std::optional<Profile> polished =
                detail::newton_polish(grid, v_mid, n, beta, path.knots[k], polish_tol);
            if (polished && h_norm_sq(grid, *polished) > 1e-8) {
                path.knots[k] = *polished;
                path.values[k] = eval_action_beta(grid, *polished, v_mid, n, beta);
                continue;
            }
        }

        // Descent step at the maximal knot, trust-capped so the knot moves at
        // most about one neighbor gap per step.
        Profile& uk = path.knots[k];
        const std::vector<double> dir_full = H.solve(g);
        std::vector<double> dir(grid.N);
        for (std::size_t i = 0; i < grid.N; ++i) dir[i] = -dir_full[i];
        const double slope = detail::dot(g, dir);
        const double dir_norm = std::sqrt(std::max(-slope, 0.0));  // |dir|_H
        const double I0 = path.values[k];
        const double fp_slack =
            1024.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(I0));

        auto gap_to = [&](const Profile& other) {
            std::vector<double> diff(grid.N);
            for (std::size_t i = 0; i < grid.N; ++i) {
                diff[i] = other[i + 1] - uk[i + 1];
            }
            return std::sqrt(std::max(detail::dot(diff, H.apply(diff)), 0.0));
        };
        const double gap = 0.5 * (gap_to(path.knots[k - 1]) + gap_to(path.knots[k + 1]));
        const double cap = dir_norm > 0.0 ? gap / dir_norm
                                          : std::numeric_limits<double>::infinity();

        double alpha = grew_last ? std::min(opts.step, alpha_prev / step_shrink)
                                 : alpha_prev;
        alpha = std::min(alpha, cap);
        bool accepted = false;
        for (std::size_t t = 0; t < max_shrinks; ++t) {
            Profile v = uk;
            for (std::size_t i = 1; i <= grid.N; ++i) {
                v[i] += alpha * dir[i - 1];
            }
            const double I1 = eval_action_beta(grid, v, v_mid, n, beta);
            if (I1 <= I0 + c1 * alpha * slope + fp_slack) {
                grew_last = (I0 - I1) > fp_slack;
                uk = std::move(v);
                path.values[k] = I1;
                alpha_prev = alpha;
                accepted = true;
                break;
            }
            alpha *= step_shrink;
        }
        if (accepted) {
            ++accepted_steps;
            if (accepted_steps % retension_every == 0) {
                average_knots(path);
                redistribute(path);
                res.retension_iters.push_back(iter);
            }
        } else {
            // No descent possible at the cap scale; resample and retry.
            average_knots(path);
            redistribute(path);
            res.retension_iters.push_back(iter);
        }
    }

    path.locate_max();
    res.iterations = iter;
    res.profile = path.knots[path.max_index];
    res.level = path.values[path.max_index];
    res.residual_norm = el_residual(grid, res.profile, v_mid, n, beta, +1).norm;
    res.path = std::move(path);
    if (gave_up && !res.converged) {
        res.warnings.push_back("gradient stalled before reaching grad_tol");
    }
    return res;
}

} // namespace ringvortex
