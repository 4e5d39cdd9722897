// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Recursive semi-supervised bulk classifier over NMFk clusters. Samples are
// clustered by the argmax of their W rows; clusters are classified by their
// dominant known class when uniform enough, expanded recursively otherwise,
// and abstained when they hold no known samples. Includes the fixed rank-2
// variant and a cosine-routing classifier over a known-only hierarchy.

#ifndef HNMFK_CLASSIFIER_HPP
#define HNMFK_CLASSIFIER_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hnmfk/clustering.hpp"
#include "hnmfk/nmfk.hpp"
#include "hnmfk/rng.hpp"
#include "hnmfk/types.hpp"

namespace hnmfk {

enum class ExitReason {
    expanded,
    pure_cluster_classified,
    abstained_no_known,
    no_unknowns,
    depth_guard,
    no_progress_guard,
};

inline const char* to_string(ExitReason r) {
    switch (r) {
        case ExitReason::expanded: return "expanded";
        case ExitReason::pure_cluster_classified: return "pure-cluster-classified";
        case ExitReason::abstained_no_known: return "abstained-no-known";
        case ExitReason::no_unknowns: return "no-unknowns";
        case ExitReason::depth_guard: return "depth-guard";
        case ExitReason::no_progress_guard: return "no-progress-guard";
    }
    return "unknown";
}

struct HierarchyNode {
    std::string node_id;
    std::string parent_id;       // empty for the root
    int cluster_index = -1;      // cluster within the parent, -1 for the root
    std::vector<int> sample_indices;  // indices into the root matrix
    int depth = 0;
    std::optional<NmfkResult> nmfk_result;  // absent for leaves-by-guard
    ExitReason exit_reason = ExitReason::expanded;
    int predicted_class = kUnknownLabel;  // class assigned at a classified leaf
    int known_count = 0;
    int unknown_count = 0;
    std::vector<std::unique_ptr<HierarchyNode>> children;
};

struct ClassifierParams {
    double t = 1.0;           // cluster uniformity threshold in (0, 1]
    int k_min_root = 1;
    int k_max_root = 100;
    NmfkOptions nmfk;         // ensemble size, noise, MU settings, seed, threads
    int max_depth = 50;
    int min_node_size = 2;    // smallest subset still worth factorizing
    bool prose_child_range = false;  // child k_max = k_opt instead of k_opt + 1
};

struct ClassificationOutcome {
    LabelVector predictions;
    std::unique_ptr<HierarchyNode> root;
};

/// Eq.-1 style assignment: cluster(i) = argmax_j W_ij, ties to the lowest
/// column. All-zero rows land in column 0 via the tie-break.
inline std::vector<int> w_cluster_assign(const Matrix& w) {
    require(w.cols() >= 1, "w_cluster_assign: W needs at least one column");
    std::vector<int> assign(static_cast<std::size_t>(w.rows()), 0);
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        int best = 0;
        double top = w(i, 0);
        for (Eigen::Index j = 1; j < w.cols(); ++j) {
            if (w(i, j) > top) {
                top = w(i, j);
                best = static_cast<int>(j);
            }
        }
        assign[static_cast<std::size_t>(i)] = best;
    }
    return assign;
}

struct Uniformity {
    double value = 0.0;      // fraction of the dominant class among knowns
    int dominant_class = 0;  // ties broken to the lowest class id
    int known_count = 0;
};

/// Fraction of the most dominant class among the known labels in a cluster.
inline Uniformity cluster_uniformity(const std::vector<int>& known_labels) {
    require(!known_labels.empty(), "cluster_uniformity: no known labels");
    std::map<int, int> counts;
    for (int c : known_labels) counts[c]++;
    Uniformity u;
    u.known_count = static_cast<int>(known_labels.size());
    int best = 0;
    for (const auto& [cls, cnt] : counts) {
        if (cnt > best) {  // map order makes ties resolve to the lowest id
            best = cnt;
            u.dominant_class = cls;
        }
    }
    u.value = static_cast<double>(best) / static_cast<double>(u.known_count);
    return u;
}

namespace detail {

inline std::uint64_t node_seed(std::uint64_t base, const std::string& node_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the node path
    for (char c : node_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix_seed(base, h);
}

inline Matrix take_rows(const Matrix& x, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

struct NodeCounts {
    std::vector<int> knowns;
    std::vector<int> unknowns;
    std::vector<int> known_labels;
};

inline NodeCounts split_known(const std::vector<int>& indices, const LabelVector& y) {
    NodeCounts c;
    for (int i : indices) {
        if (y[static_cast<std::size_t>(i)] == kUnknownLabel) {
            c.unknowns.push_back(i);
        } else {
            c.knowns.push_back(i);
            c.known_labels.push_back(y[static_cast<std::size_t>(i)]);
        }
    }
    return c;
}

/// Guard-terminated node: classify unknowns by the dominant known class when
/// one exists, otherwise leave them abstaining.
inline void resolve_guard_leaf(HierarchyNode& node, const NodeCounts& counts,
                               LabelVector& predictions, ExitReason reason) {
    node.exit_reason = reason;
    if (!counts.known_labels.empty() && !counts.unknowns.empty()) {
        const auto u = cluster_uniformity(counts.known_labels);
        node.predicted_class = u.dominant_class;
        for (int i : counts.unknowns)
            predictions[static_cast<std::size_t>(i)] = u.dominant_class;
    }
}

struct ExpandContext {
    const Matrix* x = nullptr;
    const LabelVector* y = nullptr;  // original labels; knowns never change
    LabelVector* predictions = nullptr;
    const ClassifierParams* params = nullptr;
    std::optional<int> fixed_k;  // set for the rank-2 variant
};

inline void expand_node(HierarchyNode& node, int k_min, int k_max,
                        const ExpandContext& ctx) {
    const auto& params = *ctx.params;
    const auto counts = split_known(node.sample_indices, *ctx.y);
    node.known_count = static_cast<int>(counts.knowns.size());
    node.unknown_count = static_cast<int>(counts.unknowns.size());

    if (node.depth > params.max_depth) {
        resolve_guard_leaf(node, counts, *ctx.predictions, ExitReason::depth_guard);
        return;
    }
    const auto n_sub = static_cast<Eigen::Index>(node.sample_indices.size());
    const Eigen::Index m = ctx.x->cols();
    if (n_sub < params.min_node_size || n_sub < 2) {
        resolve_guard_leaf(node, counts, *ctx.predictions, ExitReason::no_progress_guard);
        return;
    }

    int lo = k_min;
    int hi = k_max;
    if (ctx.fixed_k) lo = hi = *ctx.fixed_k;
    hi = std::min<int>(hi, static_cast<int>(std::min(n_sub, m)));
    lo = std::min(lo, hi);
    if (hi < 1) {
        resolve_guard_leaf(node, counts, *ctx.predictions, ExitReason::no_progress_guard);
        return;
    }

    const Matrix xs = take_rows(*ctx.x, node.sample_indices);
    NmfkOptions opts = params.nmfk;
    opts.seed = node_seed(params.nmfk.seed, node.node_id);
    node.nmfk_result = nmfk(xs, lo, hi, opts);
    node.exit_reason = ExitReason::expanded;
    const int k_opt = node.nmfk_result->k_opt;

    const auto assign = w_cluster_assign(node.nmfk_result->w);
    std::vector<std::vector<int>> cluster_members(static_cast<std::size_t>(k_opt));
    for (std::size_t r = 0; r < assign.size(); ++r)
        cluster_members[static_cast<std::size_t>(assign[r])].push_back(
            node.sample_indices[r]);

    for (int c = 0; c < k_opt; ++c) {
        const auto& sub = cluster_members[static_cast<std::size_t>(c)];
        if (sub.empty()) continue;
        auto child = std::make_unique<HierarchyNode>();
        child->node_id = node.node_id + "." + std::to_string(c);
        child->parent_id = node.node_id;
        child->cluster_index = c;
        child->sample_indices = sub;
        child->depth = node.depth + 1;

        const auto sub_counts = split_known(sub, *ctx.y);
        child->known_count = static_cast<int>(sub_counts.knowns.size());
        child->unknown_count = static_cast<int>(sub_counts.unknowns.size());

        if (sub_counts.unknowns.empty()) {
            child->exit_reason = ExitReason::no_unknowns;
        } else if (sub_counts.knowns.empty()) {
            child->exit_reason = ExitReason::abstained_no_known;  // stay -1
        } else {
            const auto u = cluster_uniformity(sub_counts.known_labels);
            if (u.value >= params.t) {
                child->exit_reason = ExitReason::pure_cluster_classified;
                child->predicted_class = u.dominant_class;
                for (int i : sub_counts.unknowns)
                    (*ctx.predictions)[static_cast<std::size_t>(i)] = u.dominant_class;
            } else if (sub.size() == node.sample_indices.size()) {
                resolve_guard_leaf(*child, sub_counts, *ctx.predictions,
                                   ExitReason::no_progress_guard);
            } else {
                const int child_hi = ctx.fixed_k
                                         ? *ctx.fixed_k
                                         : k_opt + (params.prose_child_range ? 0 : 1);
                expand_node(*child, 1, child_hi, ctx);
            }
        }
        node.children.push_back(std::move(child));
    }
}

inline ClassificationOutcome classify_impl(const Matrix& x, const LabelVector& y,
                                           const ClassifierParams& params,
                                           std::optional<int> fixed_k) {
    require_feature_matrix(x);
    require(y.size() == static_cast<std::size_t>(x.rows()),
            "classify: label count must match sample count");
    require(params.t > 0.0 && params.t <= 1.0, "classify: t must be in (0, 1]");
    bool any_unknown = false;
    for (int v : y) {
        require(v == kUnknownLabel || v >= 1, "classify: invalid class id");
        if (v == kUnknownLabel) any_unknown = true;
    }
    require(any_unknown, "classify: nothing to classify, all labels known");

    ClassificationOutcome out;
    out.predictions = y;
    out.root = std::make_unique<HierarchyNode>();
    out.root->node_id = "0";
    out.root->sample_indices.resize(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        out.root->sample_indices[static_cast<std::size_t>(i)] = static_cast<int>(i);

    ExpandContext ctx;
    ctx.x = &x;
    ctx.y = &y;
    ctx.predictions = &out.predictions;
    ctx.params = &params;
    ctx.fixed_k = fixed_k;
    expand_node(*out.root, params.k_min_root, params.k_max_root, ctx);
    return out;
}

}  // namespace detail

/// Semi-supervised hierarchical bulk classification. Known labels are never
/// modified; unknowns still -1 at termination are abstaining predictions.
inline ClassificationOutcome classify(const Matrix& x, const LabelVector& y,
                                      const ClassifierParams& params) {
    return detail::classify_impl(x, y, params, std::nullopt);
}

/// Ablation variant: fixed k = 2 at every node, no model selection.
inline ClassificationOutcome classify_hnmf2(const Matrix& x, const LabelVector& y,
                                            const ClassifierParams& params) {
    return detail::classify_impl(x, y, params, 2);
}

// ---------------------------------------------------------------------------
// Classical (non-bulk) classifier: a hierarchy is built from known samples
// only; new samples are routed down by cosine similarity to the H rows.

struct ClassicalNode {
    Matrix h;  // k_opt x m latent features at this node
    std::vector<std::unique_ptr<ClassicalNode>> children;  // per cluster, null = leaf
    std::vector<int> leaf_class;  // dominant class per cluster, -1 when empty
};

struct ClassicalModel {
    std::unique_ptr<ClassicalNode> root;
};

namespace detail {

inline std::unique_ptr<ClassicalNode> build_classical_node(
    const Matrix& x, const LabelVector& y, const std::vector<int>& indices,
    const std::string& node_id, int depth, int k_min, int k_max,
    const ClassifierParams& params) {
    const auto n_sub = static_cast<Eigen::Index>(indices.size());
    const Eigen::Index m = x.cols();
    int hi = std::min<int>(k_max, static_cast<int>(std::min(n_sub, m)));
    const int lo = std::min(k_min, hi);
    if (hi < 1 || n_sub < params.min_node_size) return nullptr;

    const Matrix xs = take_rows(x, indices);
    NmfkOptions opts = params.nmfk;
    opts.seed = node_seed(params.nmfk.seed, node_id);
    const auto result = nmfk(xs, lo, hi, opts);
    const int k_opt = result.k_opt;

    auto node = std::make_unique<ClassicalNode>();
    node->h = result.h;
    node->children.resize(static_cast<std::size_t>(k_opt));
    node->leaf_class.assign(static_cast<std::size_t>(k_opt), kUnknownLabel);

    const auto assign = w_cluster_assign(result.w);
    std::vector<std::vector<int>> cluster_members(static_cast<std::size_t>(k_opt));
    for (std::size_t r = 0; r < assign.size(); ++r)
        cluster_members[static_cast<std::size_t>(assign[r])].push_back(indices[r]);

    for (int c = 0; c < k_opt; ++c) {
        const auto& sub = cluster_members[static_cast<std::size_t>(c)];
        if (sub.empty()) continue;
        std::vector<int> labels;
        labels.reserve(sub.size());
        for (int i : sub) labels.push_back(y[static_cast<std::size_t>(i)]);
        const auto u = cluster_uniformity(labels);
        node->leaf_class[static_cast<std::size_t>(c)] = u.dominant_class;
        const bool no_progress = sub.size() == indices.size();
        if (u.value < params.t && !no_progress && depth < params.max_depth) {
            const int child_hi = k_opt + (params.prose_child_range ? 0 : 1);
            node->children[static_cast<std::size_t>(c)] = build_classical_node(
                x, y, sub, node_id + "." + std::to_string(c), depth + 1, 1, child_hi,
                params);
        }
    }
    return node;
}

}  // namespace detail

/// Builds the known-only hierarchy used by classical_classify.
inline ClassicalModel build_classical(const Matrix& x, const LabelVector& y,
                                      const ClassifierParams& params) {
    require_feature_matrix(x);
    require(y.size() == static_cast<std::size_t>(x.rows()),
            "build_classical: label count must match sample count");
    for (int v : y) require(v >= 1, "build_classical: all samples must be labeled");
    std::vector<int> indices(static_cast<std::size_t>(x.rows()));
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
    ClassicalModel model;
    model.root = detail::build_classical_node(x, y, indices, "0", 0, params.k_min_root,
                                              params.k_max_root, params);
    require(model.root != nullptr, "build_classical: input too small to factorize");
    return model;
}

/// Routes a feature row down the hierarchy by cosine similarity to the H
/// rows (zero vectors compare as 0; ties go to the lowest cluster) and
/// returns the leaf's dominant class, or -1 for an empty leaf.
inline int classical_classify(const ClassicalModel& model, const Vector& x) {
    require(model.root != nullptr, "classical_classify: empty model");
    const ClassicalNode* node = model.root.get();
    for (;;) {
        require(node->h.cols() == x.size(), "classical_classify: feature size mismatch");
        int best = 0;
        double top = -2.0;
        for (Eigen::Index j = 0; j < node->h.rows(); ++j) {
            const double s = detail::cosine_similarity(node->h.row(j).transpose(), x);
            if (s > top) {
                top = s;
                best = static_cast<int>(j);
            }
        }
        const auto& child = node->children[static_cast<std::size_t>(best)];
        if (!child) return node->leaf_class[static_cast<std::size_t>(best)];
        node = child.get();
    }
}

}  // namespace hnmfk

#endif  // HNMFK_CLASSIFIER_HPP
