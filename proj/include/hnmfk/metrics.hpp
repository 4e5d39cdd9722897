// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Support-weighted precision/recall/F1 over non-abstained predictions and
// abstain rates split by seen vs novel true classes.

#ifndef HNMFK_METRICS_HPP
#define HNMFK_METRICS_HPP

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hnmfk/types.hpp"

namespace hnmfk {

enum class AbstainPolicy {
    exclude,        // abstained samples are dropped from the scoring
    count_as_wrong  // abstained samples get zero credit
};

struct PerClassScore {
    int class_id = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;  // true-class count among scored samples
};

struct ClassificationReport {
    double weighted_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double coverage = 0.0;  // fraction of samples with a non-abstained prediction
    std::optional<double> abstain_seen_pct;   // % abstained among seen-class unknowns
    std::optional<double> abstain_novel_pct;  // % abstained among novel-class unknowns
    std::vector<PerClassScore> per_class;
    bool empty_flag = false;  // exclude mode with nothing predicted
};

/// Support-weighted P/R/F1. In exclude mode abstained samples (-1) are
/// dropped before scoring; in count-as-wrong mode they count against recall.
inline ClassificationReport weighted_prf(const LabelVector& y_true,
                                         const LabelVector& y_pred,
                                         AbstainPolicy policy = AbstainPolicy::exclude) {
    require(y_true.size() == y_pred.size(), "weighted_prf: length mismatch");
    require(!y_true.empty(), "weighted_prf: empty input");

    ClassificationReport report;
    std::size_t predicted = 0;
    for (int p : y_pred)
        if (p != kUnknownLabel) ++predicted;
    report.coverage = static_cast<double>(predicted) / static_cast<double>(y_pred.size());

    std::vector<std::size_t> scored;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (policy == AbstainPolicy::exclude && y_pred[i] == kUnknownLabel) continue;
        scored.push_back(i);
    }
    if (scored.empty()) {
        report.empty_flag = true;
        return report;
    }

    std::map<int, int> tp, fp, fn, support;
    std::set<int> classes;
    for (std::size_t i : scored) {
        classes.insert(y_true[i]);
        support[y_true[i]]++;
        if (y_pred[i] == y_true[i]) {
            tp[y_true[i]]++;
        } else {
            fn[y_true[i]]++;
            if (y_pred[i] != kUnknownLabel) fp[y_pred[i]]++;
        }
    }

    double total_support = 0.0;
    for (int c : classes) {
        PerClassScore s;
        s.class_id = c;
        s.support = support[c];
        const int tpp = tp[c];
        const int denom_p = tpp + fp[c];
        const int denom_r = tpp + fn[c];
        s.precision = denom_p > 0 ? static_cast<double>(tpp) / denom_p : 0.0;
        s.recall = denom_r > 0 ? static_cast<double>(tpp) / denom_r : 0.0;
        s.f1 = (s.precision + s.recall) > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        report.per_class.push_back(s);
        report.weighted_precision += s.precision * s.support;
        report.weighted_recall += s.recall * s.support;
        report.weighted_f1 += s.f1 * s.support;
        total_support += s.support;
    }
    report.weighted_precision /= total_support;
    report.weighted_recall /= total_support;
    report.weighted_f1 /= total_support;
    return report;
}

struct AbstainRates {
    std::optional<double> seen_pct;   // absent when no seen-class unknowns exist
    std::optional<double> novel_pct;  // absent when no novel-class unknowns exist
};

/// Among unknown samples (the ones the classifier was asked to predict),
/// the abstain percentage split by whether the true class has known
/// exemplars. `unknown_mask[i]` marks samples that entered as unknown.
inline AbstainRates abstain_rates(const LabelVector& y_true, const LabelVector& y_pred,
                                  const std::vector<bool>& unknown_mask,
                                  const std::set<int>& known_classes) {
    require(y_true.size() == y_pred.size() && y_true.size() == unknown_mask.size(),
            "abstain_rates: length mismatch");
    int seen_total = 0, seen_abstained = 0;
    int novel_total = 0, novel_abstained = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (!unknown_mask[i]) continue;
        const bool abstained = y_pred[i] == kUnknownLabel;
        if (known_classes.count(y_true[i])) {
            ++seen_total;
            if (abstained) ++seen_abstained;
        } else {
            ++novel_total;
            if (abstained) ++novel_abstained;
        }
    }
    AbstainRates rates;
    if (seen_total > 0)
        rates.seen_pct = 100.0 * seen_abstained / static_cast<double>(seen_total);
    if (novel_total > 0)
        rates.novel_pct = 100.0 * novel_abstained / static_cast<double>(novel_total);
    return rates;
}

}  // namespace hnmfk

#endif  // HNMFK_METRICS_HPP
