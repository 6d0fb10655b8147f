#pragma once

// Discrete H inner product <u,v>_H = int (r u_r v_r + u v / r) dr as a
// symmetric positive definite tridiagonal matrix on the interior nodes,
// with an LDL^T factorization. Gradient descent in this metric is the
// mesh-independent preconditioner both solvers use: plain L2 descent would
// need O(h^-2) iterations on fine grids.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringvortex/radial_core.hpp"

namespace ringvortex {

class HMetric {
public:
    /// angular_weight scales the u^2/r part: 1 gives the H inner product
    /// itself, n^2 gives the quadratic core of the action at winding n (the
    /// solvers precondition with that so step sizes stay O(1) in n).
    explicit HMetric(const RadialGrid& grid, double angular_weight = 1.0)
        : n_(grid.N), diag_(grid.N), off_(grid.N > 0 ? grid.N - 1 : 0),
          ld_(grid.N), loff_(grid.N > 0 ? grid.N - 1 : 0) {
        const double h = grid.h;
        const double w = angular_weight;
        for (std::size_t i = 1; i <= n_; ++i) {
            const double rm_l = grid.midpoint(i - 1);
            const double rm_r = grid.midpoint(i);
            diag_[i - 1] = (rm_l + rm_r) / h + 0.25 * w * h * (1.0 / rm_l + 1.0 / rm_r);
            if (i < n_) {
                off_[i - 1] = -rm_r / h + 0.25 * w * h / rm_r;
            }
        }
        factorize();
    }

    std::size_t size() const { return n_; }

    /// y = A_H x.
    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double v = diag_[i] * x[i];
            if (i > 0) v += off_[i - 1] * x[i - 1];
            if (i + 1 < n_) v += off_[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }

    /// Solves A_H x = rhs (LDL^T forward/back substitution).
    std::vector<double> solve(std::span<const double> rhs) const {
        std::vector<double> x(rhs.begin(), rhs.end());
        for (std::size_t i = 1; i < n_; ++i) {
            x[i] -= loff_[i - 1] * x[i - 1];
        }
        for (std::size_t i = 0; i < n_; ++i) {
            x[i] /= ld_[i];
        }
        for (std::size_t i = n_; i-- > 1;) {
            x[i - 1] -= loff_[i - 1] * x[i];
        }
        return x;
    }

private:
    void factorize() {
        if (n_ == 0) throw std::invalid_argument("HMetric: empty grid");
        ld_[0] = diag_[0];
        for (std::size_t i = 1; i < n_; ++i) {
            loff_[i - 1] = off_[i - 1] / ld_[i - 1];
            ld_[i] = diag_[i] - loff_[i - 1] * off_[i - 1];
            if (!(ld_[i] > 0.0)) {
                throw std::runtime_error("HMetric: factorization lost positivity");
            }
        }
    }

    std::size_t n_;
    std::vector<double> diag_, off_;  // matrix
    std::vector<double> ld_, loff_;   // LDL^T factors
};

} // namespace ringvortex
