// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Common aliases and small argument checks shared across the library.

#ifndef HNMFK_TYPES_HPP
#define HNMFK_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnmfk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-sample class id; -1 marks an unknown (or abstained) sample.
using LabelVector = std::vector<int>;

constexpr int kUnknownLabel = -1;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DataError(msg);
}

inline bool all_finite(const Matrix& x) {
    return x.allFinite();
}

inline void require_feature_matrix(const Matrix& x) {
    require(x.rows() >= 1 && x.cols() >= 1, "matrix must be at least 1x1");
    require(all_finite(x), "matrix contains non-finite entries");
    require((x.array() >= 0.0).all(), "matrix contains negative entries");
}

}  // namespace hnmfk

#endif  // HNMFK_TYPES_HPP
