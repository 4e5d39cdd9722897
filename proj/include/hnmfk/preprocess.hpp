// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Feature pipeline: horizontal block concatenation, z-score outlier
// remapping, and per-column min-max scaling to [0, 1].

#ifndef HNMFK_PREPROCESS_HPP
#define HNMFK_PREPROCESS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "hnmfk/types.hpp"

namespace hnmfk {

struct FeatureBlock {
    std::string name;
    Matrix values;
};

struct ColumnProvenance {
    std::string block;
    int column_in_block = 0;
};

struct AssembledMatrix {
    Matrix x;
    std::vector<ColumnProvenance> provenance;  // one entry per output column
};

/// Concatenates blocks column-wise in the given order, keeping a map from
/// every output column back to its source block.
inline AssembledMatrix assemble(const std::vector<FeatureBlock>& blocks) {
    require(!blocks.empty(), "assemble: need at least one block");
    const Eigen::Index n = blocks.front().values.rows();
    Eigen::Index total = 0;
    for (const auto& b : blocks) {
        require(b.values.rows() == n, "assemble: row-count mismatch in block '" + b.name + "'");
        total += b.values.cols();
    }
    AssembledMatrix out;
    out.x.resize(n, total);
    out.provenance.reserve(static_cast<std::size_t>(total));
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        out.x.middleCols(at, b.values.cols()) = b.values;
        for (Eigen::Index j = 0; j < b.values.cols(); ++j)
            out.provenance.push_back({b.name, static_cast<int>(j)});
        at += b.values.cols();
    }
    return out;
}

/// Remaps entries more than z_limit standard deviations from their column
/// mean to exactly mean +/- z_limit * stdev. Columns with zero variance
/// pass through unchanged. Statistics are computed on the full matrix
/// (known and unknown samples together).
inline Matrix clip_outliers(const Matrix& x, double z_limit = 3.0) {
    require(all_finite(x), "clip_outliers: non-finite input");
    require(z_limit > 0.0, "clip_outliers: z_limit must be positive");
    Matrix out = x;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).mean();
        const double var = (x.col(j).array() - mean).square().sum() / n;
        const double sd = std::sqrt(var);
        if (sd <= 0.0) continue;
        const double lo = mean - z_limit * sd;
        const double hi = mean + z_limit * sd;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (out(i, j) > hi) out(i, j) = hi;
            else if (out(i, j) < lo) out(i, j) = lo;
        }
    }
    return out;
}

/// Per-column (x - min) / (max - min); constant columns map to 0.
inline Matrix minmax_scale(const Matrix& x) {
    require(all_finite(x), "minmax_scale: non-finite input");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double lo = x.col(j).minCoeff();
        const double hi = x.col(j).maxCoeff();
        if (hi > lo)
            out.col(j) = (x.col(j).array() - lo) / (hi - lo);
        else
            out.col(j).setZero();
    }
    return out;
}

/// Full pipeline used by the CLI: assemble, clip at |z| > z_limit, scale.
inline AssembledMatrix preprocess_pipeline(const std::vector<FeatureBlock>& blocks,
                                           double z_limit = 3.0) {
    AssembledMatrix assembled = assemble(blocks);
    assembled.x = minmax_scale(clip_outliers(assembled.x, z_limit));
    return assembled;
}

}  // namespace hnmfk

#endif  // HNMFK_PREPROCESS_HPP
