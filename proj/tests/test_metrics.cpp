// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "hnmfk/metrics.hpp"
#include "hnmfk/rng.hpp"

using namespace hnmfk;

namespace {

// independent oracle built straight from a confusion matrix
struct OracleScores {
    double weighted_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
};

OracleScores confusion_oracle(const LabelVector& y_true, const LabelVector& y_pred,
                              AbstainPolicy policy) {
    std::map<std::pair<int, int>, int> confusion;  // (true, pred) -> count
    std::set<int> classes;
    int total = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (policy == AbstainPolicy::exclude && y_pred[i] == kUnknownLabel) continue;
        confusion[{y_true[i], y_pred[i]}]++;
        classes.insert(y_true[i]);
        ++total;
    }
    OracleScores out;
    for (int c : classes) {
        int tp = 0, pred_c = 0, true_c = 0;
        for (const auto& [key, count] : confusion) {
            if (key.first == c && key.second == c) tp += count;
            if (key.second == c) pred_c += count;
            if (key.first == c) true_c += count;
        }
        const double p = pred_c > 0 ? static_cast<double>(tp) / pred_c : 0.0;
        const double r = true_c > 0 ? static_cast<double>(tp) / true_c : 0.0;
        const double f1 = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        const double w = static_cast<double>(true_c) / total;
        out.weighted_precision += w * p;
        out.weighted_recall += w * r;
        out.weighted_f1 += w * f1;
    }
    return out;
}

}  // namespace

TEST_CASE("perfect predictions score 1 with full coverage", "[metrics]") {
    const LabelVector y{1, 2, 3, 1, 2};
    const auto report = weighted_prf(y, y);
    REQUIRE(report.weighted_f1 == 1.0);
    REQUIRE(report.weighted_precision == 1.0);
    REQUIRE(report.weighted_recall == 1.0);
    REQUIRE(report.coverage == 1.0);
    REQUIRE_FALSE(report.empty_flag);
}

TEST_CASE("hand-computed mixed case under both policies", "[metrics]") {
    const LabelVector y_true{1, 1, 2, 2, 3};
    const LabelVector y_pred{1, 2, 2, 2, kUnknownLabel};

    SECTION("exclude drops the abstained sample") {
        const auto r = weighted_prf(y_true, y_pred, AbstainPolicy::exclude);
        REQUIRE(r.coverage == Catch::Approx(0.8));
        // class 1: P=1, R=1/2, F1=2/3, support 2; class 2: P=2/3, R=1, F1=4/5, support 2
        REQUIRE(r.weighted_precision == Catch::Approx((1.0 * 2 + (2.0 / 3.0) * 2) / 4.0));
        REQUIRE(r.weighted_recall == Catch::Approx((0.5 * 2 + 1.0 * 2) / 4.0));
        REQUIRE(r.weighted_f1 == Catch::Approx(((2.0 / 3.0) * 2 + 0.8 * 2) / 4.0));
        REQUIRE(r.per_class.size() == 2);
        REQUIRE(r.per_class[0].class_id == 1);
        REQUIRE(r.per_class[0].support == 2);
        REQUIRE(r.per_class[1].f1 == Catch::Approx(0.8));
    }

    SECTION("count-as-wrong keeps the abstained sample with zero credit") {
        const auto r = weighted_prf(y_true, y_pred, AbstainPolicy::count_as_wrong);
        REQUIRE(r.coverage == Catch::Approx(0.8));
        // class 3 enters with support 1 and zero scores
        REQUIRE(r.per_class.size() == 3);
        REQUIRE(r.weighted_f1 == Catch::Approx(((2.0 / 3.0) * 2 + 0.8 * 2 + 0.0) / 5.0));
        REQUIRE(r.per_class[2].class_id == 3);
        REQUIRE(r.per_class[2].recall == 0.0);
    }
}

TEST_CASE("weighted scores match the confusion-matrix oracle", "[metrics]") {
    UniformRng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + rng.next_index(60);
        LabelVector y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = 1 + static_cast<int>(rng.next_index(4));
            const auto roll = rng.next_index(6);
            y_pred[i] = roll == 0 ? kUnknownLabel : 1 + static_cast<int>(rng.next_index(4));
        }
        for (auto policy : {AbstainPolicy::exclude, AbstainPolicy::count_as_wrong}) {
            const auto report = weighted_prf(y_true, y_pred, policy);
            if (report.empty_flag) continue;
            const auto oracle = confusion_oracle(y_true, y_pred, policy);
            REQUIRE(report.weighted_f1 == Catch::Approx(oracle.weighted_f1).margin(1e-12));
            REQUIRE(report.weighted_precision ==
                    Catch::Approx(oracle.weighted_precision).margin(1e-12));
            REQUIRE(report.weighted_recall ==
                    Catch::Approx(oracle.weighted_recall).margin(1e-12));
        }
    }
}

TEST_CASE("all-abstained input sets the empty flag in exclude mode", "[metrics]") {
    const LabelVector y_true{1, 2};
    const LabelVector y_pred{kUnknownLabel, kUnknownLabel};
    const auto r = weighted_prf(y_true, y_pred, AbstainPolicy::exclude);
    REQUIRE(r.empty_flag);
    REQUIRE(r.coverage == 0.0);
    const auto r2 = weighted_prf(y_true, y_pred, AbstainPolicy::count_as_wrong);
    REQUIRE_FALSE(r2.empty_flag);
    REQUIRE(r2.weighted_f1 == 0.0);
}

TEST_CASE("weighted_prf input validation", "[metrics]") {
    REQUIRE_THROWS_AS(weighted_prf({1, 2}, {1}), DataError);
    REQUIRE_THROWS_AS(weighted_prf({}, {}), DataError);
}

TEST_CASE("abstain rates split by seen and novel classes", "[metrics]") {
    // classes 1-2 have known exemplars; class 9 is novel
    const LabelVector y_true{1, 1, 2, 9, 9, 9, 2};
    const LabelVector y_pred{1, kUnknownLabel, 2, kUnknownLabel, kUnknownLabel, 1, 2};
    const std::vector<bool> unknown_mask{false, true, true, true, true, true, false};
    const std::set<int> known_classes{1, 2};
    const auto rates = abstain_rates(y_true, y_pred, unknown_mask, known_classes);
    REQUIRE(rates.seen_pct.has_value());
    REQUIRE(*rates.seen_pct == Catch::Approx(50.0));   // 1 of 2 seen unknowns abstained
    REQUIRE(rates.novel_pct.has_value());
    REQUIRE(*rates.novel_pct == Catch::Approx(200.0 / 3.0));  // 2 of 3 novel unknowns
}

TEST_CASE("abstain rates are absent when a group has no unknowns", "[metrics]") {
    const LabelVector y_true{1, 2};
    const LabelVector y_pred{1, kUnknownLabel};
    const std::vector<bool> unknown_mask{false, true};
    const auto rates = abstain_rates(y_true, y_pred, unknown_mask, {1, 2});
    REQUIRE(rates.seen_pct.has_value());
    REQUIRE_FALSE(rates.novel_pct.has_value());
    REQUIRE_THROWS_AS(abstain_rates(y_true, y_pred, {true}, {1}), DataError);
}
