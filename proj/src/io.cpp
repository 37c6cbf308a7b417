#include "sketchbench/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace sketchbench {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw Error(ErrorKind::parse,
                path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_real(std::string_view tok, const std::string& path,
                  std::size_t line_no) {
    const std::string_view digits =
        tok.starts_with('+') ? tok.substr(1) : tok; // from_chars rejects '+'
    double value = 0.0;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (digits.empty() || ec != std::errc{} || ptr != end)
        parse_fail(path, line_no, "non-numeric token '" + std::string(tok) + "'");
    return value;
}

index_t parse_index(std::string_view tok, const std::string& path,
                    std::size_t line_no) {
    const std::string_view digits =
        tok.starts_with('+') ? tok.substr(1) : tok;
    index_t value = 0;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (digits.empty() || ec != std::errc{} || ptr != end)
        parse_fail(path, line_no, "non-numeric index '" + std::string(tok) + "'");
    return value;
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Dataset parse_libsvm(const std::string& path, index_t forced_dim) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open '" + path + "'");

    std::vector<Triplet> triplets;
    std::vector<std::int32_t> labels;
    std::vector<std::string> class_names;
    std::unordered_map<double, std::int32_t> class_ids;
    index_t max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    index_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue; // blank line

        // Classes are identified by numeric label value ("+1" and "1" are the
        // same class); the first-seen text is kept as the class name.
        const double label_value = parse_real(tok, path, line_no);
        auto [it, inserted] = class_ids.try_emplace(
            label_value, static_cast<std::int32_t>(class_names.size()));
        if (inserted) class_names.push_back(tok);
        labels.push_back(it->second);

        index_t prev_index = 0;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                parse_fail(path, line_no, "expected idx:val, got '" + tok + "'");
            const index_t feature =
                parse_index(std::string_view(tok).substr(0, colon), path, line_no);
            const double value =
                parse_real(std::string_view(tok).substr(colon + 1), path, line_no);
            if (feature <= prev_index)
                parse_fail(path, line_no,
                           "non-increasing feature index " + std::to_string(feature));
            prev_index = feature;
            max_index = std::max(max_index, feature);
            if (value != 0.0) triplets.push_back({row, feature - 1, value});
        }
        ++row;
    }
    require(row > 0, ErrorKind::parse, "degenerate shape: '" + path +
                                           "' contains no samples");

    index_t dim = forced_dim > 0 ? forced_dim : max_index;
    require(dim >= max_index, ErrorKind::invalid_argument,
            "forced dimension smaller than max feature index");
    require(dim > 0, ErrorKind::parse,
            "degenerate shape: no features in '" + path + "'");

    Dataset ds;
    ds.features = SparseMatrix::from_triplets(row, dim, triplets);
    ds.labels = std::move(labels);
    ds.class_count = static_cast<index_t>(class_names.size());
    ds.class_names = std::move(class_names);
    ds.source = path;
    return ds;
}

void write_libsvm(const SparseMatrix& features,
                  const std::vector<std::string>& row_labels,
                  const std::string& path) {
    require(row_labels.size() == static_cast<std::size_t>(features.rows()),
            ErrorKind::invalid_argument, "label count does not match rows");
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write '" + path + "'");
    const CsrView view = make_row_view(features);
    for (index_t i = 0; i < view.rows; ++i) {
        out << row_labels[static_cast<std::size_t>(i)];
        auto ids = view.row_indices(i);
        auto vals = view.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            out << ' ' << (ids[k] + 1) << ':' << format_real(vals[k]);
        out << '\n';
    }
    require(out.good(), ErrorKind::io, "write failed for '" + path + "'");
}

MinMaxStats fit_minmax(const SparseMatrix& features) {
    MinMaxStats stats;
    const auto d = static_cast<std::size_t>(features.cols());
    stats.min.assign(d, 0.0);
    stats.max.assign(d, 0.0);
    for (index_t j = 0; j < features.cols(); ++j) {
        // Implicit zeros participate in the range whenever a column is not
        // fully stored.
        auto vals = features.column_values(j);
        double lo = vals.size() == static_cast<std::size_t>(features.rows())
                        ? vals[0]
                        : 0.0;
        double hi = lo;
        for (double v : vals) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        stats.min[static_cast<std::size_t>(j)] = lo;
        stats.max[static_cast<std::size_t>(j)] = hi;
    }
    return stats;
}

SparseMatrix apply_minmax_pm1(const SparseMatrix& features,
                              const MinMaxStats& stats) {
    require(stats.min.size() == static_cast<std::size_t>(features.cols()),
            ErrorKind::shape, "scaling stats dimension mismatch");
    std::vector<SparseVector> columns(static_cast<std::size_t>(features.cols()));
    for (index_t j = 0; j < features.cols(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double lo = stats.min[ju];
        const double hi = stats.max[ju];
        SparseVector& col = columns[ju];
        col.dim = features.rows();
        if (hi == lo) continue; // constant feature maps to zero
        const double scale = 2.0 / (hi - lo);
        const double mapped_zero = -lo * scale - 1.0;
        auto ids = features.column_indices(j);
        auto vals = features.column_values(j);
        std::size_t k = 0;
        for (index_t i = 0; i < features.rows(); ++i) {
            double x;
            if (k < ids.size() && ids[k] == i) {
                x = (vals[k] - lo) * scale - 1.0;
                ++k;
            } else {
                x = mapped_zero;
            }
            if (x != 0.0) {
                col.idx.push_back(i);
                col.val.push_back(x);
            }
        }
    }
    return SparseMatrix::from_columns(features.rows(), columns);
}

Dataset minmax_scale_pm1(const Dataset& ds) {
    require(ds.scaling == Scaling::none, ErrorKind::invalid_argument,
            "dataset already scaled");
    Dataset out = ds;
    out.features = apply_minmax_pm1(ds.features, fit_minmax(ds.features));
    out.scaling = Scaling::minmax_pm1;
    return out;
}

namespace {

std::string format_4dp(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

nlohmann::json report_to_json(const BenchReport& r) {
    return {{"dataset", r.dataset},
            {"method", r.method},
            {"r", r.r},
            {"acc_mean", r.accuracy_mean},
            {"acc_std", r.accuracy_std},
            {"sparsity", r.sketch_sparsity_rate},
            {"embed_ms", r.embed_ms},
            {"predict_us", r.predict_us},
            {"hyperparameters", r.hyperparameters}};
}

BenchReport report_from_json(const nlohmann::json& j) {
    BenchReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.r = j.at("r").get<index_t>();
    r.accuracy_mean = j.at("acc_mean").get<double>();
    r.accuracy_std = j.at("acc_std").get<double>();
    r.sketch_sparsity_rate = j.at("sparsity").get<double>();
    r.embed_ms = j.at("embed_ms").get<double>();
    r.predict_us = j.at("predict_us").get<double>();
    r.hyperparameters =
        j.at("hyperparameters").get<std::map<std::string, std::string>>();
    return r;
}

} // namespace

void write_report(const std::vector<BenchReport>& reports, ReportFormat format,
                  const std::string& path,
                  const std::vector<std::string>& comment_lines) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write '" + path + "'");
    if (format == ReportFormat::csv) {
        for (const std::string& line : comment_lines) out << "# " << line << '\n';
        out << "dataset,method,r,acc_mean,acc_std,sparsity,embed_ms,predict_us\n";
        for (const BenchReport& r : reports) {
            out << r.dataset << ',' << r.method << ',' << r.r << ','
                << format_4dp(r.accuracy_mean) << ','
                << format_4dp(r.accuracy_std) << ','
                << format_4dp(r.sketch_sparsity_rate) << ','
                << format_4dp(r.embed_ms) << ',' << format_4dp(r.predict_us)
                << '\n';
        }
    } else {
        nlohmann::json doc;
        doc["comments"] = comment_lines;
        doc["reports"] = nlohmann::json::array();
        for (const BenchReport& r : reports) doc["reports"].push_back(report_to_json(r));
        out << doc.dump(2) << '\n';
    }
    require(out.good(), ErrorKind::io, "write failed for '" + path + "'");
}

std::vector<BenchReport> read_reports_json(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io, "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, "bad report JSON in '" + path + "': " + e.what());
    }
    std::vector<BenchReport> reports;
    for (const auto& j : doc.at("reports")) reports.push_back(report_from_json(j));
    return reports;
}

} // namespace sketchbench
