// Copyright 2026 the hnmfk authors.
// SPDX-License-Identifier: Apache-2.0
//
// File formats: binary matrix container (magic "HNMF"), CSV matrix
// fallback, labels/mask/prediction tables, per-k diagnostics, hierarchy
// export, and the classification report. All writers are deterministic and
// round-trip exactly through the readers here.

#ifndef HNMFK_IO_HPP
#define HNMFK_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hnmfk/classifier.hpp"
#include "hnmfk/metrics.hpp"
#include "hnmfk/nmfk.hpp"
#include "hnmfk/types.hpp"

namespace hnmfk {

namespace io {

constexpr char kMatrixMagic[4] = {'H', 'N', 'M', 'F'};
constexpr std::uint16_t kMatrixVersion = 1;

namespace detail {

// shortest representation that round-trips a double exactly
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return static_cast<T>(v);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::ifstream open_input(const std::string& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode);
    if (!in) throw DataError("cannot open for reading: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

}  // namespace detail

// --- matrix --------------------------------------------------------------

inline void write_matrix_binary(const std::string& path, const Matrix& x) {
    auto out = detail::open_output(path, std::ios::binary);
    out.write(kMatrixMagic, 4);
    detail::write_le<std::uint16_t>(out, kMatrixVersion);
    detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(x.rows()));
    detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(x.cols()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            std::uint64_t bits;
            const double v = x(i, j);
            std::memcpy(&bits, &v, sizeof(bits));
            detail::write_le<std::uint64_t>(out, bits);
        }
    }
    if (!out) throw DataError("write failed: " + path);
}

inline Matrix read_matrix_binary(const std::string& path) {
    auto in = detail::open_input(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMatrixMagic, 4) != 0)
        throw DataError("not an HNMF matrix file: " + path);
    const auto version = detail::read_le<std::uint16_t>(in);
    if (version != kMatrixVersion)
        throw DataError("unsupported matrix format version in " + path);
    const auto rows = detail::read_le<std::uint64_t>(in);
    const auto cols = detail::read_le<std::uint64_t>(in);
    Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t i = 0; i < rows; ++i) {
        for (std::uint64_t j = 0; j < cols; ++j) {
            const auto bits = detail::read_le<std::uint64_t>(in);
            double v;
            std::memcpy(&v, &bits, sizeof(v));
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    if (!in) throw DataError("truncated matrix file: " + path);
    return x;
}

inline void write_matrix_csv(const std::string& path, const Matrix& x) {
    auto out = detail::open_output(path);
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? ",f" : "f") << j;
    out << "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << ",";
            out << detail::format_double(x(i, j));
        }
        out << "\n";
    }
}

inline Matrix read_matrix_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty matrix file: " + path);
    const std::size_t cols = detail::split_csv_line(line).size();
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != cols)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " fields, got " +
                            std::to_string(fields.size()));
        for (const auto& f : fields) {
            try {
                values.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": not a number: '" + f + "'");
            }
        }
        ++rows;
    }
    if (rows == 0) throw DataError("matrix file has no data rows: " + path);
    Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    return x;
}

/// Detects the binary container by its magic bytes, otherwise parses CSV.
inline Matrix read_matrix(const std::string& path) {
    {
        auto in = detail::open_input(path, std::ios::binary);
        char magic[4] = {};
        in.read(magic, 4);
        if (in && std::memcmp(magic, kMatrixMagic, 4) == 0) return read_matrix_binary(path);
    }
    return read_matrix_csv(path);
}

// --- labels / masks / predictions -----------------------------------------

inline void write_labels_csv(const std::string& path, const LabelVector& labels) {
    auto out = detail::open_output(path);
    out << "sample_id,class_id\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << i << "," << labels[i] << "\n";
}

inline LabelVector read_labels_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty labels file: " + path);
    LabelVector labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected sample_id,class_id");
        labels.push_back(std::stoi(fields[1]));
    }
    return labels;
}

inline void write_mask_csv(const std::string& path, const std::vector<bool>& known) {
    auto out = detail::open_output(path);
    out << "sample_id,known\n";
    for (std::size_t i = 0; i < known.size(); ++i) out << i << "," << (known[i] ? 1 : 0) << "\n";
}

inline std::vector<bool> read_mask_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty mask file: " + path);
    std::vector<bool> mask;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 2)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected sample_id,known");
        mask.push_back(std::stoi(fields[1]) != 0);
    }
    return mask;
}

inline void write_predictions_csv(const std::string& path, const LabelVector& predictions) {
    auto out = detail::open_output(path);
    out << "sample_id,predicted_class,abstained\n";
    for (std::size_t i = 0; i < predictions.size(); ++i)
        out << i << "," << predictions[i] << ","
            << (predictions[i] == kUnknownLabel ? 1 : 0) << "\n";
}

inline LabelVector read_predictions_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty predictions file: " + path);
    LabelVector predictions;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) throw DataError("malformed predictions file: " + path);
        predictions.push_back(std::stoi(fields[1]));
    }
    return predictions;
}

// --- per-k diagnostics -----------------------------------------------------

inline void write_diagnostics_csv(const std::string& path,
                                  const std::vector<KDiagnostics>& per_k) {
    auto out = detail::open_output(path);
    out << "k,min_silhouette,mean_silhouette,rel_error,p_value\n";
    for (const auto& d : per_k) {
        out << d.k << "," << detail::format_double(d.min_silhouette) << ","
            << detail::format_double(d.mean_silhouette) << ","
            << detail::format_double(d.rel_error) << ",";
        if (d.p_value_vs_next) out << detail::format_double(*d.p_value_vs_next);
        out << "\n";
    }
}

inline std::vector<KDiagnostics> read_diagnostics_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty diagnostics file: " + path);
    std::vector<KDiagnostics> per_k;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 5) throw DataError("malformed diagnostics file: " + path);
        KDiagnostics d;
        d.k = std::stoi(fields[0]);
        d.min_silhouette = std::stod(fields[1]);
        d.mean_silhouette = std::stod(fields[2]);
        d.rel_error = std::stod(fields[3]);
        if (!fields[4].empty()) d.p_value_vs_next = std::stod(fields[4]);
        per_k.push_back(std::move(d));
    }
    return per_k;
}

// --- hierarchy export -------------------------------------------------------

struct HierarchyRecord {
    std::string node_id;
    std::string parent_id;
    int depth = 0;
    int k_opt = -1;                 // -1 when the node did not run a factorization
    double min_silhouette = 0.0;    // of the selected k, when available
    int sample_count = 0;
    int known_count = 0;
    int unknown_count = 0;
    std::string exit_reason;
    int predicted_class = kUnknownLabel;
};

inline void flatten_hierarchy(const HierarchyNode& node, std::vector<HierarchyRecord>& out) {
    HierarchyRecord rec;
    rec.node_id = node.node_id;
    rec.parent_id = node.parent_id;
    rec.depth = node.depth;
    if (node.nmfk_result) {
        rec.k_opt = node.nmfk_result->k_opt;
        for (const auto& d : node.nmfk_result->per_k)
            if (d.k == node.nmfk_result->k_opt) rec.min_silhouette = d.min_silhouette;
    }
    rec.sample_count = static_cast<int>(node.sample_indices.size());
    rec.known_count = node.known_count;
    rec.unknown_count = node.unknown_count;
    rec.exit_reason = to_string(node.exit_reason);
    rec.predicted_class = node.predicted_class;
    out.push_back(std::move(rec));
    for (const auto& child : node.children) flatten_hierarchy(*child, out);
}

inline void write_hierarchy_csv(const std::string& path, const HierarchyNode& root) {
    std::vector<HierarchyRecord> records;
    flatten_hierarchy(root, records);
    auto out = detail::open_output(path);
    out << "node_id,parent_id,depth,k_opt,min_silhouette,sample_count,known_count,"
           "unknown_count,exit_reason,predicted_class\n";
    for (const auto& r : records) {
        out << r.node_id << "," << r.parent_id << "," << r.depth << "," << r.k_opt << ","
            << detail::format_double(r.min_silhouette) << "," << r.sample_count << ","
            << r.known_count << "," << r.unknown_count << "," << r.exit_reason << ","
            << r.predicted_class << "\n";
    }
}

inline std::vector<HierarchyRecord> read_hierarchy_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty hierarchy file: " + path);
    std::vector<HierarchyRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 10) throw DataError("malformed hierarchy file: " + path);
        HierarchyRecord r;
        r.node_id = fields[0];
        r.parent_id = fields[1];
        r.depth = std::stoi(fields[2]);
        r.k_opt = std::stoi(fields[3]);
        r.min_silhouette = std::stod(fields[4]);
        r.sample_count = std::stoi(fields[5]);
        r.known_count = std::stoi(fields[6]);
        r.unknown_count = std::stoi(fields[7]);
        r.exit_reason = fields[8];
        r.predicted_class = std::stoi(fields[9]);
        records.push_back(std::move(r));
    }
    return records;
}

// --- classification report ----------------------------------------------------

inline void write_report(const std::string& path, const ClassificationReport& report) {
    auto out = detail::open_output(path);
    out << "weighted_f1 " << detail::format_double(report.weighted_f1) << "\n";
    out << "weighted_precision " << detail::format_double(report.weighted_precision) << "\n";
    out << "weighted_recall " << detail::format_double(report.weighted_recall) << "\n";
    out << "coverage " << detail::format_double(report.coverage) << "\n";
    out << "abstain_seen_pct "
        << (report.abstain_seen_pct ? detail::format_double(*report.abstain_seen_pct)
                                    : std::string("absent"))
        << "\n";
    out << "abstain_novel_pct "
        << (report.abstain_novel_pct ? detail::format_double(*report.abstain_novel_pct)
                                     : std::string("absent"))
        << "\n";
    out << "per_class class_id precision recall f1 support\n";
    for (const auto& s : report.per_class) {
        out << "per_class " << s.class_id << " " << detail::format_double(s.precision)
            << " " << detail::format_double(s.recall) << " " << detail::format_double(s.f1)
            << " " << s.support << "\n";
    }
}

inline ClassificationReport read_report(const std::string& path) {
    auto in = detail::open_input(path);
    ClassificationReport report;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "weighted_f1") ss >> report.weighted_f1;
        else if (key == "weighted_precision") ss >> report.weighted_precision;
        else if (key == "weighted_recall") ss >> report.weighted_recall;
        else if (key == "coverage") ss >> report.coverage;
        else if (key == "abstain_seen_pct" || key == "abstain_novel_pct") {
            std::string value;
            ss >> value;
            if (value != "absent") {
                if (key == "abstain_seen_pct") report.abstain_seen_pct = std::stod(value);
                else report.abstain_novel_pct = std::stod(value);
            }
        } else if (key == "per_class") {
            PerClassScore s;
            std::string first;
            ss >> first;
            if (first == "class_id") continue;  // table header
            s.class_id = std::stoi(first);
            ss >> s.precision >> s.recall >> s.f1 >> s.support;
            report.per_class.push_back(s);
        }
    }
    return report;
}

}  // namespace io
}  // namespace hnmfk

#endif  // HNMFK_IO_HPP
