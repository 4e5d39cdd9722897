// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Automatic model selection for NMF: ensemble factorization over perturbed
// copies of X, constrained clustering of the W columns, robust medians,
// NNLS-regressed H, silhouette stability, and rank-sum comparison of the
// column-error distributions across candidate k.

#ifndef HNMFK_NMFK_HPP
#define HNMFK_NMFK_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "hnmfk/clustering.hpp"
#include "hnmfk/nmf.hpp"
#include "hnmfk/nnls.hpp"
#include "hnmfk/parallel.hpp"
#include "hnmfk/rng.hpp"
#include "hnmfk/types.hpp"
#include "hnmfk/wilcoxon.hpp"

namespace hnmfk {

struct KDiagnostics {
    int k = 0;
    double min_silhouette = 1.0;
    double mean_silhouette = 1.0;
    double rel_error = 0.0;
    std::vector<double> column_errors;
    std::optional<double> p_value_vs_next;  // absent for the last candidate
};

struct NmfkOptions {
    int perturbations = 20;      // ensemble size M
    double epsilon = 0.015;      // multiplicative noise half-width
    int max_iter = 500;
    double tol = 1e-8;
    double sil_threshold = 0.8;
    double alpha = 0.05;         // rank-sum significance level
    std::uint64_t seed = 42;
    unsigned threads = 1;
};

struct NmfkResult {
    int k_opt = 0;
    Matrix w;  // robust medians, n x k_opt
    Matrix h;  // NNLS-regressed, k_opt x m
    std::vector<KDiagnostics> per_k;
    double sil_threshold = 0.8;
    bool unstable_selection = false;  // no candidate met the threshold
};

/// Selection rule: a candidate is stable when its min silhouette meets the
/// threshold; a stable candidate qualifies when its column-error
/// distribution is statistically indistinguishable from k+1 (p >= alpha)
/// or it is the last stable candidate. The largest qualifying k wins, so
/// an early p-value plateau can never trump a larger stable candidate.
/// If nothing is stable, falls back to argmax min-silhouette and flags
/// the selection as unstable.
inline std::pair<int, bool> select_k(const std::vector<KDiagnostics>& per_k,
                                     double sil_threshold, double alpha) {
    require(!per_k.empty(), "select_k: empty diagnostics");
    int best = -1;
    int best_stable = -1;
    for (const auto& d : per_k)
        if (d.min_silhouette >= sil_threshold) best_stable = d.k;
    for (const auto& d : per_k) {
        if (d.min_silhouette < sil_threshold) continue;
        if (!d.p_value_vs_next.has_value() || *d.p_value_vs_next >= alpha ||
            d.k == best_stable)
            best = d.k;
    }
    if (best >= 0) return {best, false};
    double top = per_k.front().min_silhouette;
    int arg = per_k.front().k;
    for (const auto& d : per_k) {
        if (d.min_silhouette > top) {
            top = d.min_silhouette;
            arg = d.k;
        }
    }
    return {arg, true};
}

namespace detail {

struct EnsembleOutcome {
    std::vector<Matrix> ws;
    ClusterResult clusters;
    Matrix w_median;
    Matrix h_reg;
};

inline EnsembleOutcome run_ensemble(const Matrix& x, int k, const NmfkOptions& opts) {
    EnsembleOutcome out;
    out.ws.resize(static_cast<std::size_t>(opts.perturbations));
    MuOptions mu{opts.max_iter, opts.tol};
    parallel_for(static_cast<std::size_t>(opts.perturbations), opts.threads,
                 [&](std::size_t q) {
                     const auto kq = static_cast<std::uint64_t>(k);
                     const Matrix xq = perturb(x, opts.epsilon, mix_seed(opts.seed, kq, q, 1));
                     out.ws[q] = nmf_mu(xq, k, mix_seed(opts.seed, kq, q, 2), mu).w;
                 });
    out.clusters = custom_cluster(out.ws);
    out.w_median = out.clusters.medians;
    out.h_reg = nnls(x, out.w_median).h;
    return out;
}

}  // namespace detail

/// Algorithm: for each k in [k_min, k_max] factorize M perturbed copies,
/// cluster the W columns, take robust medians, regress H, record stability
/// and error diagnostics; then select k_opt and return its robust factors.
inline NmfkResult nmfk(const Matrix& x, int k_min, int k_max,
                       const NmfkOptions& opts = {}) {
    require_feature_matrix(x);
    require(k_min >= 1, "nmfk: k_min must be >= 1");
    require(k_min <= k_max, "nmfk: k_min must be <= k_max");
    require(k_max <= std::min(x.rows(), x.cols()), "nmfk: k_max exceeds min(n, m)");
    require(opts.perturbations >= 1, "nmfk: need at least one ensemble member");

    NmfkResult res;
    res.sil_threshold = opts.sil_threshold;
    const int count = k_max - k_min + 1;
    res.per_k.resize(static_cast<std::size_t>(count));
    std::vector<detail::EnsembleOutcome> outcomes(static_cast<std::size_t>(count));

    for (int idx = 0; idx < count; ++idx) {
        const int k = k_min + idx;
        auto& slot = outcomes[static_cast<std::size_t>(idx)];
        slot = detail::run_ensemble(x, k, opts);
        auto& diag = res.per_k[static_cast<std::size_t>(idx)];
        diag.k = k;
        const auto sil = cluster_silhouettes(slot.ws, slot.clusters.assignment);
        diag.min_silhouette = sil.min_value;
        diag.mean_silhouette = sil.mean_value;
        diag.rel_error = relative_error(x, slot.w_median, slot.h_reg);
        diag.column_errors = column_errors(x, slot.w_median, slot.h_reg);
    }
    for (int idx = 0; idx + 1 < count; ++idx) {
        res.per_k[static_cast<std::size_t>(idx)].p_value_vs_next =
            wilcoxon_ranksum(res.per_k[static_cast<std::size_t>(idx)].column_errors,
                             res.per_k[static_cast<std::size_t>(idx) + 1].column_errors);
    }

    const auto [k_opt, unstable] = select_k(res.per_k, opts.sil_threshold, opts.alpha);
    res.k_opt = k_opt;
    res.unstable_selection = unstable;
    const auto& chosen = outcomes[static_cast<std::size_t>(k_opt - k_min)];
    res.w = chosen.w_median;
    res.h = chosen.h_reg;
    return res;
}

}  // namespace hnmfk

#endif  // HNMFK_NMFK_HPP
