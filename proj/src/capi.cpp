#include "sketchbench.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "sketchbench/bench.hpp"
#include "sketchbench/classifier.hpp"
#include "sketchbench/io.hpp"

using namespace sketchbench;

struct skb_dataset {
    Dataset ds;
};

struct skb_sketcher {
    std::unique_ptr<Sketcher> impl;
};

struct skb_matrix {
    MatrixVariant m;
};

struct skb_model {
    LinearModel model;
};

namespace {

thread_local std::string g_last_error;

skb_status status_from_kind(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return SKB_ERR_INVALID_ARGUMENT;
    case ErrorKind::parse: return SKB_ERR_PARSE;
    case ErrorKind::io: return SKB_ERR_IO;
    case ErrorKind::shape: return SKB_ERR_SHAPE;
    case ErrorKind::internal: return SKB_ERR_INTERNAL;
    }
    return SKB_ERR_INTERNAL;
}

template <typename Fn>
skb_status guarded(Fn&& fn) {
    try {
        fn();
        return SKB_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_from_kind(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SKB_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SKB_ERR_INTERNAL;
    }
}

skb_status invalid_handle(const char* what) {
    g_last_error = std::string("null ") + what;
    return SKB_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
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

nlohmann::json errors_to_json(const std::vector<CellError>& errors) {
    nlohmann::json out = nlohmann::json::array();
    for (const CellError& e : errors)
        out.push_back({{"method", e.method},
                       {"r", e.r},
                       {"seed", e.seed},
                       {"message", e.message}});
    return out;
}

std::vector<CellError> errors_from_json(const nlohmann::json& j) {
    std::vector<CellError> out;
    for (const auto& e : j)
        out.push_back({e.at("method").get<std::string>(),
                       e.at("r").get<index_t>(),
                       e.at("seed").get<std::uint64_t>(),
                       e.at("message").get<std::string>()});
    return out;
}

MethodParams params_from_json_text(const char* params_json) {
    MethodParams params;
    if (!params_json || !*params_json) return params;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(params_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad params JSON: ") + e.what());
    }
    if (j.contains("lambda")) params.lambda = j.at("lambda").get<double>();
    if (j.contains("epsilon")) params.epsilon = j.at("epsilon").get<double>();
    if (j.contains("iters")) params.iters = j.at("iters").get<int>();
    if (j.contains("batch_size"))
        params.batch_size = j.at("batch_size").get<index_t>();
    return params;
}

} // namespace

const char* skb_version(void) { return "1.0.0"; }

const char* skb_status_name(skb_status status) {
    switch (status) {
    case SKB_OK: return "ok";
    case SKB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SKB_ERR_PARSE: return "parse error";
    case SKB_ERR_IO: return "io error";
    case SKB_ERR_SHAPE: return "shape mismatch";
    case SKB_ERR_INTERNAL: return "internal error";
    default: return "unknown status";
    }
}

const char* skb_last_error(void) { return g_last_error.c_str(); }

void skb_string_free(char* str) { delete[] str; }

skb_status skb_dataset_open_libsvm(const char* path, int64_t forced_dim,
                                   skb_dataset** out) {
    if (!path || !out) return invalid_handle("argument");
    return guarded([&] {
        auto handle = std::make_unique<skb_dataset>();
        handle->ds = parse_libsvm(path, forced_dim > 0 ? forced_dim : 0);
        *out = handle.release();
    });
}

skb_status skb_dataset_dims(const skb_dataset* ds, int64_t* rows, int64_t* cols,
                            int64_t* classes) {
    if (!ds) return invalid_handle("dataset");
    if (rows) *rows = ds->ds.samples();
    if (cols) *cols = ds->ds.dim();
    if (classes) *classes = ds->ds.class_count;
    return SKB_OK;
}

skb_status skb_dataset_sparsity(const skb_dataset* ds, double* out) {
    if (!ds || !out) return invalid_handle("dataset");
    return guarded([&] { *out = sparsity_rate(ds->ds.features); });
}

void skb_dataset_free(skb_dataset* ds) { delete ds; }

skb_status skb_sketcher_fit(const skb_dataset* train, const char* method,
                            int64_t r, uint64_t seed, const char* params_json,
                            skb_sketcher** out) {
    if (!train || !method || !out) return invalid_handle("argument");
    return guarded([&] {
        auto handle = std::make_unique<skb_sketcher>();
        handle->impl = make_sketcher(method_from_string(method), r,
                                     params_from_json_text(params_json));
        (void)handle->impl->fit_transform(train->ds.features, seed);
        *out = handle.release();
    });
}

skb_status skb_sketcher_transform(const skb_sketcher* sketcher,
                                  const skb_dataset* data, skb_matrix** out) {
    if (!sketcher || !data || !out) return invalid_handle("argument");
    return guarded([&] {
        auto handle = std::make_unique<skb_matrix>();
        handle->m = sketcher->impl->transform(data->ds.features);
        *out = handle.release();
    });
}

skb_status skb_sketcher_to_json(const skb_sketcher* sketcher, char** out) {
    if (!sketcher || !out) return invalid_handle("argument");
    return guarded([&] { *out = copy_string(sketcher->impl->to_json()); });
}

skb_status skb_sketcher_from_json(const char* blob, skb_sketcher** out) {
    if (!blob || !out) return invalid_handle("argument");
    return guarded([&] {
        auto handle = std::make_unique<skb_sketcher>();
        handle->impl = sketcher_from_json(blob);
        *out = handle.release();
    });
}

void skb_sketcher_free(skb_sketcher* sketcher) { delete sketcher; }

skb_status skb_matrix_dims(const skb_matrix* m, int64_t* rows, int64_t* cols) {
    if (!m) return invalid_handle("matrix");
    std::visit(
        [&](const auto& mm) {
            if (rows) *rows = mm.rows();
            if (cols) *cols = mm.cols();
        },
        m->m);
    return SKB_OK;
}

skb_status skb_matrix_nnz(const skb_matrix* m, int64_t* out) {
    if (!m || !out) return invalid_handle("matrix");
    return guarded([&] { *out = nnz(m->m); });
}

skb_status skb_matrix_sparsity(const skb_matrix* m, double* out) {
    if (!m || !out) return invalid_handle("matrix");
    return guarded([&] { *out = sparsity_rate(m->m); });
}

skb_status skb_matrix_write_libsvm(const skb_matrix* m, const int32_t* labels,
                                   size_t n, const char* path) {
    if (!m || !path) return invalid_handle("argument");
    return guarded([&] {
        const SparseMatrix carrier =
            std::holds_alternative<SparseMatrix>(m->m)
                ? std::get<SparseMatrix>(m->m)
                : sparsify(std::get<DenseMatrix>(m->m));
        std::vector<std::string> row_labels;
        row_labels.reserve(static_cast<std::size_t>(carrier.rows()));
        for (index_t i = 0; i < carrier.rows(); ++i) {
            if (labels) {
                require(static_cast<std::size_t>(i) < n,
                        ErrorKind::invalid_argument,
                        "label buffer shorter than rows");
                row_labels.push_back(
                    std::to_string(labels[static_cast<std::size_t>(i)]));
            } else {
                row_labels.emplace_back("0");
            }
        }
        write_libsvm(carrier, row_labels, path);
    });
}

void skb_matrix_free(skb_matrix* m) { delete m; }

skb_status skb_model_train(const skb_matrix* features, const int32_t* labels,
                           size_t n, int64_t class_count, double c_value,
                           uint64_t seed, skb_model** out) {
    if (!features || !labels || !out) return invalid_handle("argument");
    return guarded([&] {
        std::vector<std::int32_t> y(labels, labels + n);
        auto handle = std::make_unique<skb_model>();
        handle->model =
            train_linear_svm(features->m, y, class_count, c_value, seed);
        *out = handle.release();
    });
}

skb_status skb_model_predict(const skb_model* model, const skb_matrix* features,
                             int32_t* predictions) {
    if (!model || !features || !predictions) return invalid_handle("argument");
    return guarded([&] {
        const std::vector<std::int32_t> predicted =
            predict(model->model, features->m);
        std::copy(predicted.begin(), predicted.end(), predictions);
    });
}

skb_status skb_model_to_json(const skb_model* model, char** out) {
    if (!model || !out) return invalid_handle("argument");
    return guarded([&] { *out = copy_string(linear_model_to_json(model->model)); });
}

skb_status skb_model_from_json(const char* blob, skb_model** out) {
    if (!blob || !out) return invalid_handle("argument");
    return guarded([&] {
        auto handle = std::make_unique<skb_model>();
        handle->model = linear_model_from_json(blob);
        *out = handle.release();
    });
}

void skb_model_free(skb_model* model) { delete model; }

skb_status skb_bench_run(const char* config_json, char** result_json) {
    if (!config_json || !result_json) return invalid_handle("argument");
    return guarded([&] {
        const ExperimentConfig config = ExperimentConfig::from_json(config_json);
        const BenchRunResult result = run_bench(config);
        nlohmann::json doc;
        doc["kind"] = "bench";
        doc["config_echo"] = result.config_echo;
        doc["errors"] = errors_to_json(result.errors);
        doc["reports"] = nlohmann::json::array();
        for (const BenchReport& r : result.reports)
            doc["reports"].push_back(report_to_json(r));
        *result_json = copy_string(doc.dump());
    });
}

skb_status skb_sweep_run(const char* config_json, char** result_json) {
    if (!config_json || !result_json) return invalid_handle("argument");
    return guarded([&] {
        const ExperimentConfig config = ExperimentConfig::from_json(config_json);
        const SweepRunResult result = run_sweep(config);
        nlohmann::json doc;
        doc["kind"] = "sweep";
        doc["config_echo"] = result.config_echo;
        doc["errors"] = errors_to_json(result.errors);
        doc["rows"] = nlohmann::json::array();
        for (const SweepRow& row : result.rows)
            doc["rows"].push_back({{"x", row.x},
                                   {"method", row.method},
                                   {"acc_mean", row.acc_mean},
                                   {"acc_std", row.acc_std},
                                   {"sparsity", row.sparsity}});
        *result_json = copy_string(doc.dump());
    });
}

skb_status skb_result_write(const char* result_json, const char* format,
                            const char* path) {
    if (!result_json || !format || !path) return invalid_handle("argument");
    return guarded([&] {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(result_json);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::parse,
                        std::string("bad result JSON: ") + e.what());
        }
        const std::string fmt = format;
        require(fmt == "csv" || fmt == "json", ErrorKind::invalid_argument,
                "format must be 'csv' or 'json'");
        const ReportFormat report_format =
            fmt == "csv" ? ReportFormat::csv : ReportFormat::json;
        const std::string kind = doc.value("kind", "");
        if (kind == "bench") {
            BenchRunResult result;
            result.config_echo =
                doc.at("config_echo").get<std::vector<std::string>>();
            result.errors = errors_from_json(doc.at("errors"));
            for (const auto& r : doc.at("reports"))
                result.reports.push_back(report_from_json(r));
            write_bench_output(result, report_format, path);
        } else if (kind == "sweep") {
            SweepRunResult result;
            result.config_echo =
                doc.at("config_echo").get<std::vector<std::string>>();
            result.errors = errors_from_json(doc.at("errors"));
            for (const auto& r : doc.at("rows"))
                result.rows.push_back({r.at("x").get<double>(),
                                       r.at("method").get<std::string>(),
                                       r.at("acc_mean").get<double>(),
                                       r.at("acc_std").get<double>(),
                                       r.at("sparsity").get<double>()});
            write_sweep_output(result, report_format, path);
        } else {
            throw Error(ErrorKind::parse, "unknown result kind '" + kind + "'");
        }
    });
}

skb_status skb_sketch_file(const char* config_json, char** result_json) {
    if (!config_json || !result_json) return invalid_handle("argument");
    return guarded([&] {
        const ExperimentConfig config = ExperimentConfig::from_json(config_json);
        const SketchCommandResult result = run_sketch(config);
        nlohmann::json doc;
        doc["output_path"] = result.output_path;
        doc["sidecar_path"] = result.sidecar_path;
        doc["sparsity"] = result.sparsity;
        doc["embed_ms"] = result.embed_ms;
        *result_json = copy_string(doc.dump());
    });
}
