// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Frobenius-norm NMF via multiplicative updates, ensemble perturbation,
// and reconstruction-error metrics.

#ifndef HNMFK_NMF_HPP
#define HNMFK_NMF_HPP

#include <cstdint>
#include <vector>

#include "hnmfk/rng.hpp"
#include "hnmfk/types.hpp"

namespace hnmfk {

struct MuOptions {
    int max_iter = 500;
    double tol = 1e-8;  // relative objective change for early stop
};

struct MuResult {
    Matrix w;
    Matrix h;
    int k = 0;
    int iterations = 0;
    double final_error = 0.0;  // ||X - WH||_F
    std::vector<double> objective_history;  // Frobenius objective per iteration
};

namespace detail {

constexpr double kMuDenominatorGuard = 1e-16;

inline Matrix random_positive_matrix(Eigen::Index rows, Eigen::Index cols,
                                     UniformRng& rng) {
    Matrix m(rows, cols);
    // row-major fill order so the draw sequence is layout-independent
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.next_positive();
    return m;
}

}  // namespace detail

/// Multiplicative perturbation X_ij * u with u uniform on [1-eps, 1+eps].
/// Preserves non-negativity and sparsity; the identity when eps = 0.
inline Matrix perturb(const Matrix& x, double epsilon, std::uint64_t seed) {
    require_feature_matrix(x);
    require(epsilon >= 0.0, "perturb: epsilon must be non-negative");
    require(epsilon < 1.0, "perturb: epsilon must be < 1");
    if (epsilon == 0.0) return x;
    UniformRng rng(seed);
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out(i, j) = x(i, j) * rng.next(1.0 - epsilon, 1.0 + epsilon);
    return out;
}

/// Frobenius-norm MU minimization of ||X - WH||. W, H are initialized
/// uniform on (0, 1] from `seed`; the objective is non-increasing across
/// iterations. Stops at max_iter or when the relative objective change
/// drops below tol.
inline MuResult nmf_mu(const Matrix& x, int k, std::uint64_t seed,
                       const MuOptions& opts = {}) {
    require_feature_matrix(x);
    const auto n = x.rows();
    const auto m = x.cols();
    require(k >= 1, "nmf_mu: k must be >= 1");
    require(k <= std::min(n, m), "nmf_mu: k exceeds min(n, m)");
    require(opts.max_iter >= 1, "nmf_mu: max_iter must be >= 1");
    require(opts.tol >= 0.0, "nmf_mu: tol must be >= 0");

    UniformRng rng(seed);
    MuResult res;
    res.k = k;
    res.w = detail::random_positive_matrix(n, k, rng);
    res.h = detail::random_positive_matrix(k, m, rng);
    res.objective_history.reserve(static_cast<std::size_t>(opts.max_iter));

    double prev = (x - res.w * res.h).norm();
    for (int it = 0; it < opts.max_iter; ++it) {
        // H <- H .* (W'X) ./ (W'WH + guard)
        {
            const Matrix num = res.w.transpose() * x;
            const Matrix den = (res.w.transpose() * res.w) * res.h;
            res.h.array() *= num.array() / (den.array() + detail::kMuDenominatorGuard);
        }
        // W <- W .* (XH') ./ (WHH' + guard)
        {
            const Matrix num = x * res.h.transpose();
            const Matrix den = res.w * (res.h * res.h.transpose());
            res.w.array() *= num.array() / (den.array() + detail::kMuDenominatorGuard);
        }
        const double err = (x - res.w * res.h).norm();
        res.objective_history.push_back(err);
        res.iterations = it + 1;
        if (std::abs(prev - err) <= opts.tol * std::max(prev, 1e-30)) {
            prev = err;
            break;
        }
        prev = err;
    }
    res.final_error = prev;
    return res;
}

/// ||X - WH||_F / ||X||_F.
inline double relative_error(const Matrix& x, const Matrix& w, const Matrix& h) {
    require(w.rows() == x.rows() && h.cols() == x.cols() && w.cols() == h.rows(),
            "relative_error: shape mismatch");
    const double denom = x.norm();
    if (denom <= 0.0) throw NumericalError("relative_error: zero matrix X");
    return (x - w * h).norm() / denom;
}

/// Per-column relative reconstruction errors. Zero columns of X are
/// reported as 0.
inline std::vector<double> column_errors(const Matrix& x, const Matrix& w,
                                         const Matrix& h) {
    require(w.rows() == x.rows() && h.cols() == x.cols() && w.cols() == h.rows(),
            "column_errors: shape mismatch");
    const Matrix rec = w * h;
    std::vector<double> errs(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double denom = x.col(j).norm();
        errs[static_cast<std::size_t>(j)] =
            denom > 0.0 ? (x.col(j) - rec.col(j)).norm() / denom : 0.0;
    }
    return errs;
}

}  // namespace hnmfk

#endif  // HNMFK_NMF_HPP
