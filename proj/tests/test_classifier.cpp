// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hnmfk/classifier.hpp"
#include "hnmfk/synth.hpp"

using namespace hnmfk;

namespace {

ClassifierParams fast_params(std::uint64_t seed = 11) {
    ClassifierParams p;
    p.k_min_root = 1;
    p.k_max_root = 6;
    p.nmfk.perturbations = 6;
    p.nmfk.max_iter = 200;
    p.nmfk.tol = 1e-7;
    p.nmfk.seed = seed;
    return p;
}

// three families on disjoint feature blocks, a few unknowns each
struct SmallPlanted {
    Matrix x;
    LabelVector y;       // with -1 sentinels
    LabelVector truth;   // full labels
};

SmallPlanted small_planted(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.family_count = 3;
    spec.samples_per_family = 10;
    spec.hierarchy_levels = 1;
    spec.noise_scale = 0.03;
    spec.unknown_fraction = 0.3;
    spec.seed = seed;
    const auto data = synth_generate(spec);
    SmallPlanted out;
    out.x = data.x;
    out.truth = data.true_labels;
    out.y = masked_labels(data);
    return out;
}

int count_abstained(const LabelVector& predictions, const LabelVector& y) {
    int count = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == kUnknownLabel && predictions[i] == kUnknownLabel) ++count;
    return count;
}

// independent greedy routing through a classical tree
int route_oracle(const ClassicalNode* node, const Vector& x) {
    for (;;) {
        int best = 0;
        double top = -2.0;
        for (Eigen::Index j = 0; j < node->h.rows(); ++j) {
            const Vector row = node->h.row(j).transpose();
            const double nr = row.norm(), nx = x.norm();
            const double s = (nr <= 0 || nx <= 0) ? 0.0 : row.dot(x) / (nr * nx);
            if (s > top) {
                top = s;
                best = static_cast<int>(j);
            }
        }
        if (!node->children[static_cast<std::size_t>(best)])
            return node->leaf_class[static_cast<std::size_t>(best)];
        node = node->children[static_cast<std::size_t>(best)].get();
    }
}

}  // namespace

TEST_CASE("w_cluster_assign argmax and tie-breaks", "[classifier]") {
    Matrix w(3, 3);
    w << 0.1, 0.7, 0.2,
         0.5, 0.5, 0.0,
         0.0, 0.0, 0.0;
    const auto assign = w_cluster_assign(w);
    REQUIRE(assign == std::vector<int>{1, 0, 0});
    // scale invariance
    const auto scaled = w_cluster_assign(Matrix(3.7 * w));
    REQUIRE(scaled == assign);
}

TEST_CASE("cluster_uniformity arithmetic and tie-breaks", "[classifier]") {
    auto u = cluster_uniformity({1, 1, 2});
    REQUIRE(u.value == Catch::Approx(2.0 / 3.0));
    REQUIRE(u.dominant_class == 1);

    u = cluster_uniformity({4});
    REQUIRE(u.value == 1.0);
    REQUIRE(u.dominant_class == 4);

    u = cluster_uniformity({2, 2, 1, 1});
    REQUIRE(u.value == 0.5);
    REQUIRE(u.dominant_class == 1);  // tie broken to the lowest id

    REQUIRE_THROWS_AS(cluster_uniformity({}), DataError);
}

TEST_CASE("classify labels well-separated planted families", "[classifier]") {
    const auto data = small_planted(3);
    const auto outcome = classify(data.x, data.y, fast_params());

    for (std::size_t i = 0; i < data.y.size(); ++i) {
        if (data.y[i] != kUnknownLabel) {
            REQUIRE(outcome.predictions[i] == data.y[i]);  // knowns untouched
        } else {
            REQUIRE(outcome.predictions[i] == data.truth[i]);
        }
    }
    REQUIRE(outcome.root->exit_reason == ExitReason::expanded);
    REQUIRE(outcome.root->nmfk_result.has_value());
}

TEST_CASE("clusters without known samples abstain", "[classifier]") {
    SyntheticSpec spec;
    spec.family_count = 3;
    spec.samples_per_family = 8;
    spec.hierarchy_levels = 1;
    spec.noise_scale = 0.02;
    spec.unknown_fraction = 0.25;
    spec.novel_family_count = 1;  // family 3 has no known exemplars
    spec.seed = 4;
    const auto data = synth_generate(spec);
    const auto y = masked_labels(data);
    const auto outcome = classify(data.x, y, fast_params(21));

    int novel_abstained = 0, novel_total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (data.true_labels[i] == 3) {
            ++novel_total;
            if (outcome.predictions[i] == kUnknownLabel) ++novel_abstained;
        }
    }
    REQUIRE(novel_total == 8);
    REQUIRE(novel_abstained == novel_total);

    // output closure: predictions come from known classes or -1
    const std::set<int> allowed{kUnknownLabel, 1, 2};
    for (int p : outcome.predictions) REQUIRE(allowed.count(p) == 1);
}

TEST_CASE("decision-path walkthrough on a 9x3 toy", "[classifier]") {
    Matrix x(9, 3);
    x << 1.00, 0.02, 0.01,   // 0: known a, pattern 1
         0.97, 0.01, 0.03,   // 1: unknown, pattern 1
         0.02, 1.00, 0.02,   // 2: unknown, pattern 2
         0.01, 0.96, 0.01,   // 3: unknown, pattern 2
         0.00, 0.25, 1.00,   // 4: known a, pattern 3a
         0.25, 0.00, 1.00,   // 5: known b, pattern 3b
         0.98, 0.02, 0.02,   // 6: known a, pattern 1
         0.03, 0.99, 0.02,   // 7: unknown, pattern 2
         0.26, 0.01, 0.99;   // 8: unknown, pattern 3b
    const LabelVector y{1, -1, -1, -1, 1, 2, 1, -1, -1};

    ClassifierParams params = fast_params(2);
    params.k_max_root = 3;
    params.nmfk.perturbations = 8;
    const auto outcome = classify(x, y, params);

    REQUIRE(outcome.root->nmfk_result->k_opt == 3);
    REQUIRE(outcome.predictions[1] == 1);              // joined the known-a cluster
    REQUIRE(outcome.predictions[2] == kUnknownLabel);  // cluster of unknowns only
    REQUIRE(outcome.predictions[3] == kUnknownLabel);
    REQUIRE(outcome.predictions[7] == kUnknownLabel);
    REQUIRE(outcome.predictions[8] == 2);              // resolved by the second factorization

    // the mixed cluster was expanded one level deeper
    bool saw_expansion = false;
    for (const auto& child : outcome.root->children)
        if (child->exit_reason == ExitReason::expanded) {
            saw_expansion = true;
            REQUIRE(child->nmfk_result.has_value());
            REQUIRE(child->nmfk_result->k_opt == 2);
        }
    REQUIRE(saw_expansion);
}

TEST_CASE("classify input validation", "[classifier]") {
    const auto data = small_planted(5);
    LabelVector all_known = data.truth;
    REQUIRE_THROWS_AS(classify(data.x, all_known, fast_params()), DataError);
    LabelVector short_labels(3, kUnknownLabel);
    REQUIRE_THROWS_AS(classify(data.x, short_labels, fast_params()), DataError);
    ClassifierParams bad = fast_params();
    bad.t = 0.0;
    REQUIRE_THROWS_AS(classify(data.x, data.y, bad), DataError);
}

TEST_CASE("classify is deterministic", "[classifier]") {
    const auto data = small_planted(6);
    auto params = fast_params(31);
    const auto a = classify(data.x, data.y, params);
    const auto b = classify(data.x, data.y, params);
    REQUIRE(a.predictions == b.predictions);
    params.nmfk.threads = 4;
    const auto c = classify(data.x, data.y, params);
    REQUIRE(a.predictions == c.predictions);
}

TEST_CASE("hnmf2 separates two patterns at the fixed rank", "[classifier]") {
    Matrix x(4, 3);
    x << 1.0, 0.1, 0.0,
         0.9, 0.1, 0.1,
         0.0, 0.1, 1.0,
         0.1, 0.1, 0.9;
    const LabelVector y{3, -1, 5, -1};
    auto params = fast_params(8);
    const auto outcome = classify_hnmf2(x, y, params);
    REQUIRE(outcome.predictions[1] == 3);
    REQUIRE(outcome.predictions[3] == 5);
    REQUIRE(outcome.root->nmfk_result->k_opt == 2);
}

TEST_CASE("hnmf2 classifies separable two-family data perfectly", "[classifier]") {
    SyntheticSpec spec;
    spec.family_count = 2;
    spec.samples_per_family = 12;
    spec.hierarchy_levels = 1;
    spec.noise_scale = 0.02;
    spec.unknown_fraction = 0.25;
    spec.seed = 12;
    const auto data = synth_generate(spec);
    const auto y = masked_labels(data);
    const auto a = classify_hnmf2(data.x, y, fast_params(41));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == kUnknownLabel && a.predictions[i] != kUnknownLabel)
            REQUIRE(a.predictions[i] == data.true_labels[i]);
    }
    // determinism
    const auto b = classify_hnmf2(data.x, y, fast_params(41));
    REQUIRE(a.predictions == b.predictions);
}

TEST_CASE("classical classifier routes by cosine similarity", "[classifier]") {
    // hand-built model with orthogonal H rows
    ClassicalModel model;
    model.root = std::make_unique<ClassicalNode>();
    Matrix h(2, 4);
    h << 1, 1, 0, 0,
         0, 0, 1, 1;
    model.root->h = h;
    model.root->children.resize(2);
    model.root->leaf_class = {7, 9};

    Vector a(4), b(4), zero(4);
    a << 2, 2, 0, 0;
    b << 0, 0, 0.5, 0.5;
    zero.setZero();
    REQUIRE(classical_classify(model, a) == 7);
    REQUIRE(classical_classify(model, b) == 9);
    REQUIRE(classical_classify(model, zero) == 7);  // tie -> cluster 0
}

TEST_CASE("classical classifier on planted data matches the path oracle", "[classifier]") {
    SyntheticSpec spec;
    spec.family_count = 4;
    spec.samples_per_family = 10;
    spec.hierarchy_levels = 2;
    spec.super_groups = 2;
    spec.noise_scale = 0.03;
    spec.unknown_fraction = 0.3;
    spec.seed = 17;
    const auto data = synth_generate(spec);

    std::vector<int> known_rows;
    LabelVector known_labels;
    for (std::size_t i = 0; i < data.known_mask.size(); ++i)
        if (data.known_mask[i]) {
            known_rows.push_back(static_cast<int>(i));
            known_labels.push_back(data.true_labels[i]);
        }
    Matrix xk(static_cast<Eigen::Index>(known_rows.size()), data.x.cols());
    for (std::size_t i = 0; i < known_rows.size(); ++i)
        xk.row(static_cast<Eigen::Index>(i)) = data.x.row(known_rows[i]);

    auto params = fast_params(19);
    params.t = 0.99;
    const auto model = build_classical(xk, known_labels, params);

    int correct = 0, total = 0;
    for (std::size_t i = 0; i < data.known_mask.size(); ++i) {
        if (data.known_mask[i]) continue;
        const Vector row = data.x.row(static_cast<Eigen::Index>(i)).transpose();
        const int predicted = classical_classify(model, row);
        REQUIRE(predicted == route_oracle(model.root.get(), row));
        ++total;
        if (predicted == data.true_labels[i]) ++correct;
    }
    REQUIRE(total > 0);
    REQUIRE(correct >= (3 * total) / 4);  // separable data routes mostly right
}

TEST_CASE("raising t does not reduce abstentions on guard-free runs", "[classifier]") {
    const auto data = small_planted(23);
    auto params = fast_params(29);
    params.t = 0.5;
    const auto lo = classify(data.x, data.y, params);
    params.t = 1.0;
    const auto hi = classify(data.x, data.y, params);
    REQUIRE(count_abstained(hi.predictions, data.y) >=
            count_abstained(lo.predictions, data.y));
}
