// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Two-sided Wilcoxon rank-sum test. Exact enumeration for small tie-free
// samples, normal approximation with tie and continuity corrections
// otherwise.

#ifndef HNMFK_WILCOXON_HPP
#define HNMFK_WILCOXON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hnmfk/types.hpp"

namespace hnmfk {

namespace detail {

constexpr std::size_t kExactLimit = 16;  // max |a|+|b| for exact enumeration

/// Midranks of the pooled sample; also reports whether ties exist and the
/// tie-correction term sum(t^3 - t).
struct RankInfo {
    std::vector<double> ranks;  // aligned with the pooled order of (a then b)
    bool has_ties = false;
    double tie_term = 0.0;
};

inline RankInfo midranks(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::size_t> order(n);
    std::vector<double> pooled(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) pooled[a.size() + i] = b[i];
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

    RankInfo info;
    info.ranks.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) info.ranks[order[t]] = rank;
        const double tie = static_cast<double>(j - i + 1);
        if (tie > 1.0) {
            info.has_ties = true;
            info.tie_term += tie * tie * tie - tie;
        }
        i = j + 1;
    }
    return info;
}

/// Exact two-sided p-value for tie-free data: enumerate all C(n, na)
/// placements of sample a's ranks and compare rank sums against the
/// observed one.
inline double exact_two_sided_p(std::size_t na, std::size_t nb, double observed_sum) {
    const std::size_t n = na + nb;
    std::vector<std::size_t> comb(na);
    for (std::size_t i = 0; i < na; ++i) comb[i] = i;
    std::size_t total = 0;
    std::size_t le = 0;
    std::size_t ge = 0;
    for (;;) {
        std::size_t sum = 0;
        for (std::size_t c : comb) sum += c + 1;
        ++total;
        const double s = static_cast<double>(sum);
        if (s <= observed_sum + 1e-9) ++le;
        if (s >= observed_sum - 1e-9) ++ge;
        // next combination in lexicographic order
        std::size_t i = na;
        while (i > 0) {
            --i;
            if (comb[i] < n - na + i) {
                ++comb[i];
                for (std::size_t j = i + 1; j < na; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
            if (i == 0) {
                const double p = 2.0 * static_cast<double>(std::min(le, ge)) /
                                 static_cast<double>(total);
                return std::min(1.0, p);
            }
        }
    }
}

inline double normal_two_sided_p(double rank_sum_a, std::size_t na, std::size_t nb,
                                 double tie_term) {
    const double n1 = static_cast<double>(na);
    const double n2 = static_cast<double>(nb);
    const double n = n1 + n2;
    const double mean = n1 * (n + 1.0) / 2.0;
    double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0;  // all pooled values identical
    double z = std::abs(rank_sum_a - mean) - 0.5;  // continuity correction
    if (z < 0.0) z = 0.0;
    z /= std::sqrt(var);
    const double p = std::erfc(z / std::sqrt(2.0));
    return std::min(1.0, std::max(p, 1e-300));
}

}  // namespace detail

/// Two-sided rank-sum p-value in (0, 1]. Exact when |a|+|b| <= 16 and the
/// pooled sample is tie-free.
inline double wilcoxon_ranksum(const std::vector<double>& a, const std::vector<double>& b) {
    require(!a.empty() && !b.empty(), "wilcoxon_ranksum: empty sample");
    const auto info = detail::midranks(a, b);
    double rank_sum_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum_a += info.ranks[i];

    if (a.size() + b.size() <= detail::kExactLimit && !info.has_ties)
        return detail::exact_two_sided_p(a.size(), b.size(), rank_sum_a);
    return detail::normal_two_sided_p(rank_sum_a, a.size(), b.size(), info.tie_term);
}

}  // namespace hnmfk

#endif  // HNMFK_WILCOXON_HPP
