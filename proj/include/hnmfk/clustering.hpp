// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Constrained clustering of ensemble W columns: every cluster holds exactly
// one column from each ensemble member. Assignment is a per-member optimal
// matching (Hungarian) against the current cluster medians under cosine
// similarity, iterated to a fixed point. Cluster stability is measured with
// cosine-distance silhouettes.

#ifndef HNMFK_CLUSTERING_HPP
#define HNMFK_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hnmfk/types.hpp"

namespace hnmfk {

struct ClusterResult {
    // assignment[q][col] = cluster index of member q's column `col`
    std::vector<std::vector<int>> assignment;
    Matrix medians;  // n x k entrywise medians of the clustered columns
    bool zero_column_flag = false;
    int rounds = 0;
};

struct SilhouetteResult {
    std::vector<double> per_cluster;
    double min_value = 1.0;
    double mean_value = 1.0;
    bool singleton_flag = false;  // a convention fired (k = 1 or size-1 clusters)
};

namespace detail {

/// Cosine similarity; zero vectors compare as 0 to everything.
inline double cosine_similarity(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

/// Hungarian algorithm (Jonker-Volgenant style potentials), square
/// min-cost assignment. Returns row -> column.
inline std::vector<int> min_cost_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);    // column -> row
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
    return row_to_col;
}

inline double median_of(std::vector<double>& values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double hi = values[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Clusters the M*k ensemble columns under the one-column-per-member
/// constraint. Medians are initialized from member 0 and refined by
/// alternating per-member optimal matching and median recomputation.
inline ClusterResult custom_cluster(const std::vector<Matrix>& members,
                                    int max_rounds = 100) {
    require(!members.empty(), "custom_cluster: empty ensemble");
    const Eigen::Index n = members[0].rows();
    const Eigen::Index k = members[0].cols();
    for (const auto& w : members)
        require(w.rows() == n && w.cols() == k, "custom_cluster: shape mismatch");

    const std::size_t m_count = members.size();
    ClusterResult res;
    res.assignment.assign(m_count, std::vector<int>(static_cast<std::size_t>(k), 0));
    res.medians = members[0];

    for (const auto& w : members)
        for (Eigen::Index j = 0; j < k; ++j)
            if (w.col(j).isZero(0.0)) res.zero_column_flag = true;

    std::vector<double> pool(m_count);
    for (int round = 0; round < max_rounds; ++round) {
        bool changed = (round == 0);
        for (std::size_t q = 0; q < m_count; ++q) {
            Matrix cost(k, k);  // negative similarity, minimized
            for (Eigen::Index c = 0; c < k; ++c)
                for (Eigen::Index j = 0; j < k; ++j)
                    cost(c, j) = -detail::cosine_similarity(members[q].col(c), res.medians.col(j));
            const auto match = detail::min_cost_assignment(cost);
            for (Eigen::Index c = 0; c < k; ++c) {
                if (res.assignment[q][static_cast<std::size_t>(c)] != match[static_cast<std::size_t>(c)]) {
                    res.assignment[q][static_cast<std::size_t>(c)] = match[static_cast<std::size_t>(c)];
                    changed = true;
                }
            }
        }
        res.rounds = round + 1;
        if (!changed) break;

        // entrywise medians per cluster
        std::vector<std::vector<int>> cluster_cols(static_cast<std::size_t>(k),
                                                   std::vector<int>(m_count, 0));
        for (std::size_t q = 0; q < m_count; ++q)
            for (Eigen::Index c = 0; c < k; ++c)
                cluster_cols[static_cast<std::size_t>(res.assignment[q][static_cast<std::size_t>(c)])][q] =
                    static_cast<int>(c);
        for (Eigen::Index j = 0; j < k; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                for (std::size_t q = 0; q < m_count; ++q)
                    pool[q] = members[q](i, cluster_cols[static_cast<std::size_t>(j)][q]);
                res.medians(i, j) = detail::median_of(pool);
            }
        }
    }
    return res;
}

/// Standard silhouettes over the ensemble columns with cosine distance,
/// averaged per cluster. Conventions: k = 1 and singleton clusters score 1.
inline SilhouetteResult cluster_silhouettes(const std::vector<Matrix>& members,
                                            const std::vector<std::vector<int>>& assignment) {
    require(!members.empty(), "cluster_silhouettes: empty ensemble");
    const Eigen::Index k = members[0].cols();
    const std::size_t m_count = members.size();

    SilhouetteResult res;
    res.per_cluster.assign(static_cast<std::size_t>(k), 1.0);
    if (k == 1 || m_count == 1) {
        res.singleton_flag = true;
        return res;
    }

    // flatten all columns with their cluster labels
    const std::size_t total = m_count * static_cast<std::size_t>(k);
    std::vector<Vector> points;
    points.reserve(total);
    std::vector<int> labels;
    labels.reserve(total);
    for (std::size_t q = 0; q < m_count; ++q) {
        for (Eigen::Index c = 0; c < k; ++c) {
            points.push_back(members[q].col(c));
            labels.push_back(assignment[q][static_cast<std::size_t>(c)]);
        }
    }

    Matrix dist(total, total);
    for (std::size_t i = 0; i < total; ++i) {
        dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
        for (std::size_t j = i + 1; j < total; ++j) {
            const double d = 1.0 - detail::cosine_similarity(points[i], points[j]);
            dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
            dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
        }
    }

    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    // every cluster has exactly m_count points
    for (std::size_t i = 0; i < total; ++i) {
        double a = 0.0;
        std::vector<double> other(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < total; ++j) {
            if (j == i) continue;
            if (labels[j] == labels[i])
                a += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            else
                other[static_cast<std::size_t>(labels[j])] +=
                    dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        a /= static_cast<double>(m_count - 1);
        double b = std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < k; ++c) {
            if (c == labels[i]) continue;
            b = std::min(b, other[static_cast<std::size_t>(c)] / static_cast<double>(m_count));
        }
        const double denom = std::max(a, b);
        const double s = denom > 0.0 ? (b - a) / denom : 0.0;
        sums[static_cast<std::size_t>(labels[i])] += s;
    }

    res.min_value = 1.0;
    double grand = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        const double avg = sums[static_cast<std::size_t>(c)] / static_cast<double>(m_count);
        res.per_cluster[static_cast<std::size_t>(c)] = avg;
        res.min_value = std::min(res.min_value, avg);
        grand += avg;
    }
    res.mean_value = grand / static_cast<double>(k);
    return res;
}

}  // namespace hnmfk

#endif  // HNMFK_CLUSTERING_HPP
