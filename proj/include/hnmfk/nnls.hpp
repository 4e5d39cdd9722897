// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Column-wise non-negative least squares (Lawson-Hanson active set).
// Used to regress H against the robust W medians.

#ifndef HNMFK_NNLS_HPP
#define HNMFK_NNLS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "hnmfk/types.hpp"

namespace hnmfk {

struct NnlsResult {
    Matrix h;  // k x m, entrywise >= 0
    bool zero_column_flag = false;      // W had an all-zero column
    std::vector<int> zero_columns;      // indices of those columns
};

namespace detail {

/// min ||A z - b||_2 s.t. z >= 0, for a single right-hand side.
/// Lawson-Hanson: grow a passive set by the most positive gradient
/// component, backtracking when the unconstrained subproblem goes negative.
inline Vector nnls_column(const Matrix& a, const Vector& b, double kkt_tol) {
    const Eigen::Index k = a.cols();
    Vector h = Vector::Zero(k);
    std::vector<bool> passive(static_cast<std::size_t>(k), false);
    const double scale = std::max(1.0, b.norm() * a.norm());
    const int max_outer = 3 * static_cast<int>(k) + 10;

    for (int outer = 0; outer < max_outer; ++outer) {
        const Vector grad = a.transpose() * (b - a * h);
        int best = -1;
        double best_grad = kkt_tol * scale;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (!passive[static_cast<std::size_t>(i)] && grad(i) > best_grad) {
                best_grad = grad(i);
                best = static_cast<int>(i);
            }
        }
        if (best < 0) break;  // KKT satisfied
        passive[static_cast<std::size_t>(best)] = true;

        for (;;) {
            std::vector<int> idx;
            for (Eigen::Index i = 0; i < k; ++i)
                if (passive[static_cast<std::size_t>(i)]) idx.push_back(static_cast<int>(i));
            Matrix ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
            const Vector z = ap.colPivHouseholderQr().solve(b);

            double alpha = 1.0;
            for (std::size_t c = 0; c < idx.size(); ++c) {
                if (z(static_cast<Eigen::Index>(c)) <= 0.0) {
                    const double hi = h(idx[c]);
                    const double step = hi / (hi - z(static_cast<Eigen::Index>(c)));
                    alpha = std::min(alpha, step);
                }
            }
            if (alpha >= 1.0) {
                h.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) h(idx[c]) = std::max(0.0, z(static_cast<Eigen::Index>(c)));
                break;
            }
            for (std::size_t c = 0; c < idx.size(); ++c) {
                const Eigen::Index i = idx[c];
                h(i) += alpha * (z(static_cast<Eigen::Index>(c)) - h(i));
                if (h(i) <= 1e-14) {
                    h(i) = 0.0;
                    passive[static_cast<std::size_t>(i)] = false;
                }
            }
        }
    }
    return h;
}

}  // namespace detail

/// For each column of X solves min ||X_:j - W h_j||_2 with h_j >= 0.
/// All-zero columns of W are excluded from the solve; their coefficients
/// are fixed to 0 and the diagnostic flag is set.
inline NnlsResult nnls(const Matrix& x, const Matrix& w, double kkt_tol = 1e-10) {
    require(w.rows() == x.rows(), "nnls: row mismatch between X and W");
    require(w.cols() >= 1, "nnls: W must have at least one column");
    require(all_finite(x) && all_finite(w), "nnls: non-finite input");

    const Eigen::Index k = w.cols();
    NnlsResult res;
    res.h = Matrix::Zero(k, x.cols());

    std::vector<int> active_cols;
    for (Eigen::Index j = 0; j < k; ++j) {
        if (w.col(j).isZero(0.0)) {
            res.zero_column_flag = true;
            res.zero_columns.push_back(static_cast<int>(j));
        } else {
            active_cols.push_back(static_cast<int>(j));
        }
    }
    if (active_cols.empty()) return res;

    Matrix wa(w.rows(), static_cast<Eigen::Index>(active_cols.size()));
    for (std::size_t c = 0; c < active_cols.size(); ++c) wa.col(static_cast<Eigen::Index>(c)) = w.col(active_cols[c]);

    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Vector hj = detail::nnls_column(wa, x.col(j), kkt_tol);
        for (std::size_t c = 0; c < active_cols.size(); ++c)
            res.h(active_cols[c], j) = hj(static_cast<Eigen::Index>(c));
    }
    return res;
}

}  // namespace hnmfk

#endif  // HNMFK_NNLS_HPP
