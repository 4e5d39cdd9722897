// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Planted-hierarchy synthetic data: super-group patterns refined into
// per-family patterns, plus uniform noise, scaled to [0, 1]. Used as the
// desk-scale stand-in for a labeled malware corpus.

#ifndef HNMFK_SYNTH_HPP
#define HNMFK_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hnmfk/preprocess.hpp"
#include "hnmfk/rng.hpp"
#include "hnmfk/types.hpp"

namespace hnmfk {

struct SyntheticSpec {
    int family_count = 10;
    int samples_per_family = 100;
    std::vector<int> family_sizes;  // optional imbalanced sizes; overrides the above
    int hierarchy_levels = 2;       // 1 = flat families, 2 = grouped families
    int super_groups = 0;           // 0 = auto (about 3 families per group)
    double noise_scale = 0.05;      // additive uniform noise half-width
    double unknown_fraction = 0.3;  // stratified per family
    int novel_family_count = 0;     // trailing families become unknown-only
    std::uint64_t seed = 1;

    int super_block_width = 6;   // features shared within a super group
    int family_block_width = 4;  // features private to a family
};

struct SyntheticData {
    Matrix x;                       // n x m, entrywise in [0, 1]
    LabelVector true_labels;        // class ids 1..family_count
    std::vector<bool> known_mask;   // true = labeled sample
};

/// Labels with unknowns masked to -1, as fed to the classifier.
inline LabelVector masked_labels(const SyntheticData& data) {
    LabelVector y = data.true_labels;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!data.known_mask[i]) y[i] = kUnknownLabel;
    return y;
}

inline SyntheticData synth_generate(const SyntheticSpec& spec) {
    require(spec.family_count >= 1, "synth: need at least one family");
    require(spec.novel_family_count >= 0 && spec.novel_family_count < spec.family_count,
            "synth: novel families must be fewer than total families");
    require(spec.unknown_fraction > 0.0 && spec.unknown_fraction < 1.0,
            "synth: unknown fraction must be in (0, 1)");
    require(spec.hierarchy_levels == 1 || spec.hierarchy_levels == 2,
            "synth: hierarchy levels must be 1 or 2");
    require(spec.noise_scale >= 0.0, "synth: noise scale must be non-negative");

    std::vector<int> sizes = spec.family_sizes;
    if (sizes.empty()) {
        require(spec.samples_per_family >= 2, "synth: need at least 2 samples per family");
        sizes.assign(static_cast<std::size_t>(spec.family_count), spec.samples_per_family);
    }
    require(sizes.size() == static_cast<std::size_t>(spec.family_count),
            "synth: family size list does not match family count");

    const int f_count = spec.family_count;
    const int groups = spec.hierarchy_levels == 2
                           ? (spec.super_groups > 0 ? spec.super_groups
                                                    : std::max(1, (f_count + 2) / 3))
                           : 0;
    const Eigen::Index m = static_cast<Eigen::Index>(groups) * spec.super_block_width +
                           static_cast<Eigen::Index>(f_count) * spec.family_block_width;
    Eigen::Index n = 0;
    for (int s : sizes) {
        require(s >= 1, "synth: family size must be >= 1");
        n += s;
    }

    SyntheticData data;
    data.x = Matrix::Zero(n, m);
    data.true_labels.resize(static_cast<std::size_t>(n));
    data.known_mask.assign(static_cast<std::size_t>(n), true);

    UniformRng noise_rng(mix_seed(spec.seed, 0xA11CE));
    Eigen::Index row = 0;
    for (int f = 0; f < f_count; ++f) {
        const int group = groups > 0 ? f % groups : 0;
        for (int s = 0; s < sizes[static_cast<std::size_t>(f)]; ++s, ++row) {
            data.true_labels[static_cast<std::size_t>(row)] = f + 1;
            if (groups > 0) {
                const Eigen::Index at = static_cast<Eigen::Index>(group) * spec.super_block_width;
                data.x.row(row).segment(at, spec.super_block_width).setOnes();
            }
            const Eigen::Index at = static_cast<Eigen::Index>(groups) * spec.super_block_width +
                                    static_cast<Eigen::Index>(f) * spec.family_block_width;
            data.x.row(row).segment(at, spec.family_block_width).setOnes();
            if (spec.noise_scale > 0.0)
                for (Eigen::Index j = 0; j < m; ++j)
                    data.x(row, j) += noise_rng.next(0.0, spec.noise_scale);
        }
    }
    data.x = minmax_scale(data.x);

    // stratified unknown selection; trailing novel families are unknown-only
    UniformRng mask_rng(mix_seed(spec.seed, 0xB0B));
    row = 0;
    for (int f = 0; f < f_count; ++f) {
        const int size = sizes[static_cast<std::size_t>(f)];
        const bool novel = f >= f_count - spec.novel_family_count;
        std::vector<int> order(static_cast<std::size_t>(size));
        for (int s = 0; s < size; ++s) order[static_cast<std::size_t>(s)] = static_cast<int>(row) + s;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[mask_rng.next_index(i)]);
        // non-novel families always keep at least one known exemplar
        const int unknowns =
            novel ? size
                  : std::min(size - 1,
                             std::max(1, static_cast<int>(
                                             std::lround(spec.unknown_fraction * size))));
        for (int u = 0; u < unknowns && u < size; ++u)
            data.known_mask[static_cast<std::size_t>(order[static_cast<std::size_t>(u)])] = false;
        row += size;
    }
    return data;
}

}  // namespace hnmfk

#endif  // HNMFK_SYNTH_HPP
