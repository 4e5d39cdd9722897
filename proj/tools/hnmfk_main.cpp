// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: preprocess, synth, classify, nmfk-diag, eval.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "hnmfk/hnmfk.hpp"

namespace {

using namespace hnmfk;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void write_matrix_auto(const std::string& path, const Matrix& x) {
    if (ends_with(path, ".csv"))
        io::write_matrix_csv(path, x);
    else
        io::write_matrix_binary(path, x);
}

struct ClassifyConfig {
    std::string matrix_path;
    std::string labels_path;
    std::string mask_path;
    std::string truth_path;
    std::string predictions_out = "predictions.csv";
    std::string hierarchy_out;
    std::string report_out;
    std::string mode = "hnmfk";
    ClassifierParams params;
};

void add_nmfk_options(CLI::App* cmd, NmfkOptions& opts) {
    cmd->add_option("--perturbations,-M", opts.perturbations, "ensemble size M")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", opts.epsilon, "perturbation half-width")
        ->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--max-iter", opts.max_iter, "MU iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--tol", opts.tol, "MU relative-change stop tolerance");
    cmd->add_option("--sil-threshold", opts.sil_threshold, "minimum-silhouette stability threshold");
    cmd->add_option("--alpha", opts.alpha, "rank-sum significance level");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--threads", opts.threads, "worker thread count");
}

ClassificationReport build_report(const LabelVector& truth, const LabelVector& predictions,
                                  const std::vector<bool>& unknown_mask,
                                  const std::set<int>& known_classes) {
    LabelVector true_u, pred_u;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!unknown_mask[i]) continue;
        true_u.push_back(truth[i]);
        pred_u.push_back(predictions[i]);
    }
    ClassificationReport report = weighted_prf(true_u, pred_u, AbstainPolicy::exclude);
    const auto rates = abstain_rates(truth, predictions, unknown_mask, known_classes);
    report.abstain_seen_pct = rates.seen_pct;
    report.abstain_novel_pct = rates.novel_pct;
    return report;
}

int run_classify(const ClassifyConfig& cfg) {
    const Matrix x = io::read_matrix(cfg.matrix_path);
    LabelVector y = io::read_labels_csv(cfg.labels_path);
    if (y.size() != static_cast<std::size_t>(x.rows()))
        throw DataError("labels/matrix row count mismatch");

    LabelVector truth;
    if (!cfg.mask_path.empty()) {
        const auto mask = io::read_mask_csv(cfg.mask_path);
        if (mask.size() != y.size()) throw DataError("mask/labels length mismatch");
        truth = y;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (!mask[i]) y[i] = kUnknownLabel;
    }
    if (!cfg.truth_path.empty()) truth = io::read_labels_csv(cfg.truth_path);

    LabelVector predictions;
    if (cfg.mode == "classical") {
        std::vector<int> known_rows;
        LabelVector known_labels;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] != kUnknownLabel) {
                known_rows.push_back(static_cast<int>(i));
                known_labels.push_back(y[i]);
            }
        }
        if (known_rows.empty()) throw DataError("classical mode needs known samples");
        if (known_rows.size() == y.size())
            throw DataError("nothing to classify, all labels known");
        Matrix xk(static_cast<Eigen::Index>(known_rows.size()), x.cols());
        for (std::size_t i = 0; i < known_rows.size(); ++i)
            xk.row(static_cast<Eigen::Index>(i)) = x.row(known_rows[i]);
        const auto model = build_classical(xk, known_labels, cfg.params);
        predictions = y;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == kUnknownLabel)
                predictions[i] = classical_classify(model, x.row(static_cast<Eigen::Index>(i)).transpose());
        io::write_predictions_csv(cfg.predictions_out, predictions);
    } else {
        const auto outcome = cfg.mode == "hnmf2" ? classify_hnmf2(x, y, cfg.params)
                                                 : classify(x, y, cfg.params);
        predictions = outcome.predictions;
        io::write_predictions_csv(cfg.predictions_out, predictions);
        if (!cfg.hierarchy_out.empty()) io::write_hierarchy_csv(cfg.hierarchy_out, *outcome.root);
    }

    if (!cfg.report_out.empty()) {
        if (truth.empty())
            throw DataError("report requested but no ground truth supplied (--mask or --truth)");
        if (truth.size() != y.size()) throw DataError("truth/labels length mismatch");
        std::vector<bool> unknown_mask(y.size());
        std::set<int> known_classes;
        for (std::size_t i = 0; i < y.size(); ++i) {
            unknown_mask[i] = y[i] == kUnknownLabel;
            if (y[i] != kUnknownLabel) known_classes.insert(y[i]);
        }
        io::write_report(cfg.report_out, build_report(truth, predictions, unknown_mask, known_classes));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NMF with automatic model selection and hierarchical semi-supervised "
                 "classification with abstention"};
    app.require_subcommand(1);

    // --- preprocess ---
    auto* pre = app.add_subcommand("preprocess", "concatenate feature blocks, remap outliers, scale to [0,1]");
    std::vector<std::string> block_paths;
    std::string pre_out = "matrix.bin";
    double z_limit = 3.0;
    pre->add_option("--blocks", block_paths, "feature block files (CSV or binary), in order")
        ->required()
        ->expected(-1);
    pre->add_option("--out", pre_out, "output matrix file (.csv for text, else binary)");
    pre->add_option("--z-limit", z_limit, "outlier z-score limit")->check(CLI::PositiveNumber);
    pre->set_config("--config");

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "generate planted-hierarchy synthetic data");
    SyntheticSpec spec;
    std::string synth_matrix = "synth_matrix.bin";
    std::string synth_labels = "synth_labels.csv";
    std::string synth_mask = "synth_mask.csv";
    synth->add_option("--families", spec.family_count)->check(CLI::PositiveNumber);
    synth->add_option("--samples-per-family", spec.samples_per_family)->check(CLI::PositiveNumber);
    synth->add_option("--family-sizes", spec.family_sizes, "imbalanced per-family sizes");
    synth->add_option("--levels", spec.hierarchy_levels)->check(CLI::Range(1, 2));
    synth->add_option("--super-groups", spec.super_groups);
    synth->add_option("--noise", spec.noise_scale)->check(CLI::NonNegativeNumber);
    synth->add_option("--unknown-fraction", spec.unknown_fraction);
    synth->add_option("--novel-families", spec.novel_family_count)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--matrix-out", synth_matrix);
    synth->add_option("--labels-out", synth_labels, "true labels CSV");
    synth->add_option("--mask-out", synth_mask, "known-sample mask CSV");
    synth->set_config("--config");

    // --- classify ---
    auto* cls = app.add_subcommand("classify", "hierarchical semi-supervised bulk classification");
    ClassifyConfig cfg;
    cls->add_option("--matrix", cfg.matrix_path)->required();
    cls->add_option("--labels", cfg.labels_path, "labels CSV; -1 marks unknowns")->required();
    cls->add_option("--mask", cfg.mask_path, "known mask CSV; when given, labels are taken as truth and masked");
    cls->add_option("--truth", cfg.truth_path, "ground-truth labels CSV for the report");
    cls->add_option("--predictions-out", cfg.predictions_out);
    cls->add_option("--hierarchy-out", cfg.hierarchy_out);
    cls->add_option("--report-out", cfg.report_out);
    cls->add_option("--mode", cfg.mode)->check(CLI::IsMember({"hnmfk", "hnmf2", "classical"}));
    cls->add_option("--t", cfg.params.t, "cluster uniformity threshold")->check(CLI::Range(1e-9, 1.0));
    cls->add_option("--k-min", cfg.params.k_min_root)->check(CLI::PositiveNumber);
    cls->add_option("--k-max", cfg.params.k_max_root)->check(CLI::PositiveNumber);
    cls->add_option("--max-depth", cfg.params.max_depth)->check(CLI::PositiveNumber);
    cls->add_flag("--prose-child-range", cfg.params.prose_child_range,
                  "child search range [1, k_opt] instead of [1, k_opt+1]");
    add_nmfk_options(cls, cfg.params.nmfk);
    cls->set_config("--config");

    // --- nmfk-diag ---
    auto* diag = app.add_subcommand("nmfk-diag", "per-k stability/error diagnostics table");
    std::string diag_matrix;
    std::string diag_out = "diagnostics.csv";
    int diag_kmin = 1, diag_kmax = 10;
    NmfkOptions diag_opts;
    diag->add_option("--matrix", diag_matrix)->required();
    diag->add_option("--k-min", diag_kmin)->check(CLI::PositiveNumber);
    diag->add_option("--k-max", diag_kmax)->check(CLI::PositiveNumber);
    diag->add_option("--out", diag_out);
    add_nmfk_options(diag, diag_opts);
    diag->set_config("--config");

    // --- eval ---
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    std::string eval_truth, eval_pred, eval_mask;
    std::string eval_out = "report.txt";
    std::string eval_policy = "exclude";
    eval->add_option("--truth", eval_truth, "true labels CSV")->required();
    eval->add_option("--predictions", eval_pred)->required();
    eval->add_option("--mask", eval_mask, "known mask CSV")->required();
    eval->add_option("--policy", eval_policy)->check(CLI::IsMember({"exclude", "count-as-wrong"}));
    eval->add_option("--out", eval_out);
    eval->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage or help text
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (*pre) {
            std::vector<FeatureBlock> blocks;
            for (const auto& path : block_paths)
                blocks.push_back({path, io::read_matrix(path)});
            const auto assembled = preprocess_pipeline(blocks, z_limit);
            write_matrix_auto(pre_out, assembled.x);
        } else if (*synth) {
            const auto data = synth_generate(spec);
            write_matrix_auto(synth_matrix, data.x);
            io::write_labels_csv(synth_labels, data.true_labels);
            io::write_mask_csv(synth_mask, data.known_mask);
        } else if (*cls) {
            return run_classify(cfg);
        } else if (*diag) {
            const Matrix x = io::read_matrix(diag_matrix);
            if (diag_kmin > diag_kmax) throw DataError("k-min must be <= k-max");
            const auto result = nmfk(x, diag_kmin, diag_kmax, diag_opts);
            io::write_diagnostics_csv(diag_out, result.per_k);
        } else if (*eval) {
            const auto truth = io::read_labels_csv(eval_truth);
            const auto predictions = io::read_predictions_csv(eval_pred);
            const auto mask = io::read_mask_csv(eval_mask);
            if (truth.size() != predictions.size() || truth.size() != mask.size())
                throw DataError("truth/predictions/mask length mismatch");
            std::vector<bool> unknown_mask(mask.size());
            std::set<int> known_classes;
            for (std::size_t i = 0; i < mask.size(); ++i) {
                unknown_mask[i] = !mask[i];
                if (mask[i]) known_classes.insert(truth[i]);
            }
            LabelVector true_u, pred_u;
            for (std::size_t i = 0; i < mask.size(); ++i) {
                if (!unknown_mask[i]) continue;
                true_u.push_back(truth[i]);
                pred_u.push_back(predictions[i]);
            }
            const auto policy = eval_policy == "exclude" ? AbstainPolicy::exclude
                                                         : AbstainPolicy::count_as_wrong;
            ClassificationReport report = weighted_prf(true_u, pred_u, policy);
            const auto rates = abstain_rates(truth, predictions, unknown_mask, known_classes);
            report.abstain_seen_pct = rates.seen_pct;
            report.abstain_novel_pct = rates.novel_pct;
            io::write_report(eval_out, report);
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
