#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchbench/matrix.hpp"

namespace sketchbench {

enum class Scaling { none, minmax_pm1 };

// A loaded classification dataset. Labels are remapped to contiguous
// 0-based ids in first-seen order; the original label text of each class is
// kept in class_names.
struct Dataset {
    SparseMatrix features;            // n x d
    std::vector<std::int32_t> labels; // values in [0, class_count)
    index_t class_count = 0;
    std::string source;
    Scaling scaling = Scaling::none;
    std::vector<std::string> class_names;

    index_t samples() const { return features.rows(); }
    index_t dim() const { return features.cols(); }
};

// LIBSVM text format: "label idx:val idx:val ..." with 1-based strictly
// increasing indices. forced_dim, when positive, overrides the inferred
// feature dimension (otherwise d = max index seen). Explicit zero values are
// dropped. Malformed lines raise a parse error carrying the line number.
Dataset parse_libsvm(const std::string& path, index_t forced_dim = 0);

void write_libsvm(const SparseMatrix& features,
                  const std::vector<std::string>& row_labels,
                  const std::string& path);

// Per-feature min/max statistics for the [-1, 1] map. Fit on a training
// split, apply to any split with the same dimension.
struct MinMaxStats {
    std::vector<double> min;
    std::vector<double> max;
};

MinMaxStats fit_minmax(const SparseMatrix& features);
SparseMatrix apply_minmax_pm1(const SparseMatrix& features,
                              const MinMaxStats& stats);

// Convenience: fit and apply to the same dataset. Requires scaling == none.
Dataset minmax_scale_pm1(const Dataset& ds);

struct BenchReport {
    std::string dataset;
    std::string method;
    index_t r = 0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;
    double sketch_sparsity_rate = 0.0;
    double embed_ms = 0.0;
    double predict_us = 0.0;
    std::map<std::string, std::string> hyperparameters;

    bool operator==(const BenchReport&) const = default;
};

enum class ReportFormat { csv, json };

// CSV output starts with the fixed header
//   dataset,method,r,acc_mean,acc_std,sparsity,embed_ms,predict_us
// and formats every real value with 4 decimal places. Any comment_lines are
// written first, each prefixed with "# ".
void write_report(const std::vector<BenchReport>& reports, ReportFormat format,
                  const std::string& path,
                  const std::vector<std::string>& comment_lines = {});

std::vector<BenchReport> read_reports_json(const std::string& path);

} // namespace sketchbench
