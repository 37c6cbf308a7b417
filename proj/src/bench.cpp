#include "sketchbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sketchbench/rng.hpp"
#include "sketchbench/sketchers.hpp"

namespace sketchbench {

std::string to_string(Method m) {
    switch (m) {
    case Method::gaussian: return "gaussian";
    case Method::achlioptas: return "achlioptas";
    case Method::countsketch: return "countsketch";
    case Method::srht: return "srht";
    case Method::srht_topr: return "srht_topr";
    case Method::esck_full: return "esck_full";
    case Method::esck_minibatch: return "esck_minibatch";
    case Method::identity: return "identity";
    }
    throw Error(ErrorKind::internal, "unknown method");
}

Method method_from_string(const std::string& name) {
    for (Method m : {Method::gaussian, Method::achlioptas, Method::countsketch,
                     Method::srht, Method::srht_topr, Method::esck_full,
                     Method::esck_minibatch, Method::identity})
        if (to_string(m) == name) return m;
    throw Error(ErrorKind::invalid_argument, "unknown method '" + name + "'");
}

bool is_esck(Method m) {
    return m == Method::esck_full || m == Method::esck_minibatch;
}

namespace {

class BaselineSketcher final : public Sketcher {
public:
    BaselineSketcher(Method method, index_t r, const MethodParams& params)
        : method_(method), r_(r), params_(params) {}

    explicit BaselineSketcher(SketchModel model)
        : method_(method_from_string(to_string(model.method))),
          r_(model.r), model_(std::move(model)) {}

    std::string name() const override { return to_string(method_); }
    index_t output_dim() const override { return r_; }

    MatrixVariant fit_transform(const SparseMatrix& x_train,
                                std::uint64_t seed) override {
        switch (method_) {
        case Method::gaussian: model_ = fit_gaussian(x_train.cols(), r_, seed); break;
        case Method::achlioptas:
            model_ = fit_achlioptas(x_train.cols(), r_, seed);
            break;
        case Method::countsketch:
            model_ = fit_countsketch(x_train.cols(), r_, seed,
                                     params_.countsketch_sqrt_s);
            break;
        case Method::srht: model_ = fit_srht(x_train.cols(), r_, seed); break;
        case Method::srht_topr:
            model_ = fit_srht_topr(x_train.cols(), r_, seed, x_train);
            break;
        default:
            throw Error(ErrorKind::internal, "not a baseline method");
        }
        return apply(*model_, x_train);
    }

    MatrixVariant transform(const SparseMatrix& x) const override {
        require(model_.has_value(), ErrorKind::invalid_argument,
                "sketcher has not been fitted");
        return apply(*model_, x);
    }

    std::string to_json() const override {
        require(model_.has_value(), ErrorKind::invalid_argument,
                "sketcher has not been fitted");
        return sketch_model_to_json(*model_);
    }

    const SketchModel& model() const { return *model_; }

private:
    Method method_;
    index_t r_;
    MethodParams params_;
    std::optional<SketchModel> model_;
};

class EsckSketcher final : public Sketcher {
public:
    EsckSketcher(Method method, index_t r, const MethodParams& params)
        : method_(method), r_(r), params_(params) {}

    explicit EsckSketcher(EsckModel model)
        : method_(method_from_string(model.variant)),
          r_(model.phi.cluster_count), fitted_(std::move(model)) {}

    std::string name() const override { return to_string(method_); }
    index_t output_dim() const override { return r_; }

    MatrixVariant fit_transform(const SparseMatrix& x_train,
                                std::uint64_t seed) override {
        EsckConfig cfg;
        cfg.r = r_;
        cfg.iters = params_.iters;
        cfg.eta = params_.eta;
        cfg.projection.lambda = params_.lambda;
        cfg.projection.epsilon = params_.epsilon;
        cfg.batch_size = params_.batch_size;
        cfg.seed = seed;
        cfg.empty_cluster_policy = params_.empty_cluster_policy;
        EsckFitResult fit = method_ == Method::esck_full
                                ? esck_fit(x_train, cfg)
                                : esck_fit_minibatch(x_train, cfg);
        fitted_ = EsckModel{to_string(method_), std::move(fit.d_signs),
                            std::move(fit.phi), {}, std::move(fit.centers)};
        fitted_->scaling = scaling_from_phi(fitted_->phi);
        return std::move(fit.sketched);
    }

    MatrixVariant transform(const SparseMatrix& x) const override {
        require(fitted_.has_value(), ErrorKind::invalid_argument,
                "sketcher has not been fitted");
        return inductive_transform(x, fitted_->d_signs, fitted_->phi);
    }

    std::string to_json() const override {
        require(fitted_.has_value(), ErrorKind::invalid_argument,
                "sketcher has not been fitted");
        return esck_model_to_json(*fitted_);
    }

    const EsckModel& model() const { return *fitted_; }

private:
    Method method_;
    index_t r_;
    MethodParams params_;
    std::optional<EsckModel> fitted_;
};

class IdentitySketcher final : public Sketcher {
public:
    std::string name() const override { return "identity"; }
    index_t output_dim() const override { return dim_; }

    MatrixVariant fit_transform(const SparseMatrix& x_train,
                                std::uint64_t) override {
        dim_ = x_train.cols();
        return x_train;
    }

    MatrixVariant transform(const SparseMatrix& x) const override { return x; }

private:
    index_t dim_ = 0;
};

} // namespace

std::unique_ptr<Sketcher> make_sketcher(Method method, index_t r,
                                        const MethodParams& params) {
    if (method == Method::identity) return std::make_unique<IdentitySketcher>();
    if (is_esck(method)) return std::make_unique<EsckSketcher>(method, r, params);
    return std::make_unique<BaselineSketcher>(method, r, params);
}

std::unique_ptr<Sketcher> sketcher_from_json(const std::string& blob) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(blob);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad model JSON: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    if (kind == "sketch")
        return std::make_unique<BaselineSketcher>(sketch_model_from_json(blob));
    if (kind == "esck")
        return std::make_unique<EsckSketcher>(esck_model_from_json(blob));
    throw Error(ErrorKind::parse, "not a sketcher model blob");
}

std::vector<double> ExperimentConfig::effective_c_grid() const {
    if (!c_grid.empty()) return c_grid;
    std::vector<double> grid;
    for (int e = -5; e <= 5; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

namespace {

template <typename T>
std::string join_list(const std::vector<T>& values) {
    std::ostringstream out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        if constexpr (std::is_same_v<T, Method>)
            out << to_string(values[i]);
        else
            out << values[i];
    }
    return out.str();
}

} // namespace

std::vector<std::string> ExperimentConfig::echo_lines() const {
    std::vector<std::string> lines;
    lines.push_back("data = " + data);
    lines.push_back("method = " + join_list(methods));
    lines.push_back("r = " + join_list(r_list));
    lines.push_back("seeds = " + join_list(seeds));
    lines.push_back("lambda = " + join_list(lambda_list));
    lines.push_back("epsilon = " + std::to_string(epsilon));
    lines.push_back("iters = " + std::to_string(iters));
    lines.push_back("batch_size = " + std::to_string(batch_size));
    lines.push_back("c_grid = " + join_list(effective_c_grid()));
    lines.push_back("folds = " + std::to_string(folds));
    lines.push_back(std::string("scale = ") + (scale_minmax ? "minmax" : "none"));
    lines.push_back(std::string("format = ") +
                    (format == ReportFormat::csv ? "csv" : "json"));
    if (!sweep.empty()) lines.push_back("sweep = " + sweep);
    return lines;
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["data"] = data;
    nlohmann::json ms = nlohmann::json::array();
    for (Method m : methods) ms.push_back(to_string(m));
    j["methods"] = ms;
    j["r"] = r_list;
    j["seeds"] = seeds;
    j["lambda"] = lambda_list;
    j["epsilon"] = epsilon;
    j["iters"] = iters;
    j["batch_size"] = batch_size;
    j["c_grid"] = c_grid;
    j["folds"] = folds;
    j["scale"] = scale_minmax ? "minmax" : "none";
    j["out"] = out;
    j["format"] = format == ReportFormat::csv ? "csv" : "json";
    j["jobs"] = jobs;
    j["sweep"] = sweep;
    return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad config JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.data = j.at("data").get<std::string>();
        for (const auto& m : j.at("methods"))
            cfg.methods.push_back(method_from_string(m.get<std::string>()));
        cfg.r_list = j.at("r").get<std::vector<index_t>>();
        if (j.contains("seeds"))
            cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("lambda"))
            cfg.lambda_list = j.at("lambda").get<std::vector<double>>();
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("iters")) cfg.iters = j.at("iters").get<int>();
        if (j.contains("batch_size"))
            cfg.batch_size = j.at("batch_size").get<index_t>();
        if (j.contains("c_grid"))
            cfg.c_grid = j.at("c_grid").get<std::vector<double>>();
        if (j.contains("folds")) cfg.folds = j.at("folds").get<int>();
        if (j.contains("scale"))
            cfg.scale_minmax = j.at("scale").get<std::string>() == "minmax";
        if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
        if (j.contains("format"))
            cfg.format = j.at("format").get<std::string>() == "json"
                             ? ReportFormat::json
                             : ReportFormat::csv;
        if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
        if (j.contains("sweep")) cfg.sweep = j.at("sweep").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad config JSON: ") + e.what());
    }
    require(!cfg.methods.empty(), ErrorKind::invalid_argument,
            "config needs at least one method");
    require(!cfg.r_list.empty(), ErrorKind::invalid_argument,
            "config needs at least one r");
    require(!cfg.seeds.empty(), ErrorKind::invalid_argument,
            "config needs at least one seed");
    require(!cfg.lambda_list.empty(), ErrorKind::invalid_argument,
            "config needs at least one lambda");
    return cfg;
}

namespace {

std::string dataset_id_from_path(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

MethodParams params_from_config(const ExperimentConfig& cfg, double lambda) {
    MethodParams params;
    params.lambda = lambda;
    params.epsilon = cfg.epsilon;
    params.iters = cfg.iters;
    params.batch_size = cfg.batch_size;
    return params;
}

struct CellResult {
    bool ok = false;
    CvOutcome outcome;
    double lambda = 0.0;
    std::string error;
};

// Runs one (method, r, seed) cell; esck methods grid-search lambda by CV
// mean accuracy.
CellResult run_cell(const Dataset& ds, const ExperimentConfig& cfg,
                    Method method, index_t r, std::uint64_t seed) {
    CellResult result;
    try {
        CvPlan plan;
        plan.folds = cfg.folds;
        plan.seed = seed;
        CvOptions options;
        options.scale_minmax = cfg.scale_minmax;
        options.dataset_id = dataset_id_from_path(cfg.data);
        const std::vector<double> c_grid = cfg.effective_c_grid();

        const std::vector<double> lambdas =
            is_esck(method) ? cfg.lambda_list : std::vector<double>{cfg.lambda_list.front()};
        bool have_best = false;
        for (double lambda : lambdas) {
            auto sketcher = make_sketcher(method, r, params_from_config(cfg, lambda));
            CvOutcome outcome = cross_validate(ds, *sketcher, c_grid, plan, options);
            if (!have_best ||
                outcome.report.accuracy_mean > result.outcome.report.accuracy_mean) {
                result.outcome = std::move(outcome);
                result.lambda = lambda;
                have_best = true;
            }
        }
        result.ok = true;
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

void run_cells(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::clamp<int>(
        jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1))));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count;
                 i = next.fetch_add(1))
                fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string format_lambda(double lambda) {
    std::ostringstream out;
    out << lambda;
    return out.str();
}

} // namespace

BenchRunResult run_bench(const ExperimentConfig& config) {
    const Dataset ds = parse_libsvm(config.data);

    struct Cell {
        Method method;
        index_t r;
        std::uint64_t seed;
        CellResult result;
    };
    std::vector<Cell> cells;
    for (Method method : config.methods)
        for (index_t r : config.r_list)
            for (std::uint64_t seed : config.seeds)
                cells.push_back({method, r, seed, {}});

    run_cells(cells.size(), config.jobs, [&](std::size_t i) {
        cells[i].result =
            run_cell(ds, config, cells[i].method, cells[i].r, cells[i].seed);
    });

    BenchRunResult result;
    result.config_echo = config.echo_lines();
    for (Method method : config.methods) {
        for (index_t r : config.r_list) {
            std::vector<double> pooled_acc, sparsities, embed_times, predict_times;
            std::string lambda_by_seed;
            bool any_ok = false;
            for (const Cell& cell : cells) {
                if (cell.method != method || cell.r != r) continue;
                if (!cell.result.ok) {
                    result.errors.push_back({to_string(method), r, cell.seed,
                                             cell.result.error});
                    continue;
                }
                any_ok = true;
                const CvOutcome& outcome = cell.result.outcome;
                pooled_acc.insert(pooled_acc.end(),
                                  outcome.fold_accuracies.begin(),
                                  outcome.fold_accuracies.end());
                sparsities.push_back(outcome.report.sketch_sparsity_rate);
                embed_times.push_back(outcome.report.embed_ms);
                predict_times.push_back(outcome.report.predict_us);
                if (!lambda_by_seed.empty()) lambda_by_seed += ",";
                lambda_by_seed += format_lambda(cell.result.lambda);
            }
            if (!any_ok) continue;

            const auto mean = [](const std::vector<double>& v) {
                return v.empty() ? 0.0
                                 : std::accumulate(v.begin(), v.end(), 0.0) /
                                       static_cast<double>(v.size());
            };
            BenchReport report;
            report.dataset = dataset_id_from_path(config.data);
            report.method = to_string(method);
            report.r = r;
            report.accuracy_mean = mean(pooled_acc);
            double var = 0.0;
            for (double a : pooled_acc)
                var += (a - report.accuracy_mean) * (a - report.accuracy_mean);
            report.accuracy_std = pooled_acc.empty()
                                      ? 0.0
                                      : std::sqrt(var / static_cast<double>(
                                                            pooled_acc.size()));
            report.sketch_sparsity_rate = mean(sparsities);
            report.embed_ms = mean(embed_times);
            report.predict_us = mean(predict_times);
            report.hyperparameters["seeds"] = join_list(config.seeds);
            report.hyperparameters["folds"] = std::to_string(config.folds);
            if (is_esck(method)) {
                report.hyperparameters["lambda"] = lambda_by_seed;
                report.hyperparameters["epsilon"] = std::to_string(config.epsilon);
                report.hyperparameters["iters"] = std::to_string(config.iters);
                if (method == Method::esck_minibatch)
                    report.hyperparameters["batch_size"] =
                        std::to_string(config.batch_size);
            }
            result.reports.push_back(std::move(report));
        }
    }
    return result;
}

SweepRunResult run_sweep(const ExperimentConfig& config) {
    require(config.sweep == "r" || config.sweep == "lambda",
            ErrorKind::invalid_argument, "sweep must be 'r' or 'lambda'");
    SweepRunResult result;
    result.config_echo = config.echo_lines();

    if (config.sweep == "r") {
        BenchRunResult bench = run_bench(config);
        result.errors = std::move(bench.errors);
        for (const BenchReport& report : bench.reports)
            result.rows.push_back({static_cast<double>(report.r), report.method,
                                   report.accuracy_mean, report.accuracy_std,
                                   report.sketch_sparsity_rate});
        return result;
    }

    // Lambda sweep: one row per (method, lambda) at the first r. Methods
    // that ignore lambda are run once and repeated across lambda rows.
    const Dataset ds = parse_libsvm(config.data);
    const index_t r = config.r_list.front();

    struct Cell {
        Method method;
        double lambda;
        std::uint64_t seed;
        CellResult result;
    };
    std::vector<Cell> cells;
    for (Method method : config.methods) {
        const std::vector<double> lambdas =
            is_esck(method) ? config.lambda_list
                            : std::vector<double>{config.lambda_list.front()};
        for (double lambda : lambdas)
            for (std::uint64_t seed : config.seeds)
                cells.push_back({method, lambda, seed, {}});
    }

    run_cells(cells.size(), config.jobs, [&](std::size_t i) {
        Cell& cell = cells[i];
        CellResult res;
        try {
            CvPlan plan;
            plan.folds = config.folds;
            plan.seed = cell.seed;
            CvOptions options;
            options.scale_minmax = config.scale_minmax;
            options.dataset_id = dataset_id_from_path(config.data);
            auto sketcher = make_sketcher(
                cell.method, r, params_from_config(config, cell.lambda));
            res.outcome = cross_validate(ds, *sketcher,
                                         config.effective_c_grid(), plan, options);
            res.lambda = cell.lambda;
            res.ok = true;
        } catch (const std::exception& e) {
            res.error = e.what();
        }
        cell.result = std::move(res);
    });

    for (Method method : config.methods) {
        for (double lambda : config.lambda_list) {
            const double cell_lambda =
                is_esck(method) ? lambda : config.lambda_list.front();
            std::vector<double> pooled_acc, sparsities;
            bool any_ok = false;
            for (const Cell& cell : cells) {
                if (cell.method != method || cell.lambda != cell_lambda) continue;
                if (!cell.result.ok) {
                    if (lambda == cell_lambda)
                        result.errors.push_back({to_string(method), r, cell.seed,
                                                 cell.result.error});
                    continue;
                }
                any_ok = true;
                pooled_acc.insert(pooled_acc.end(),
                                  cell.result.outcome.fold_accuracies.begin(),
                                  cell.result.outcome.fold_accuracies.end());
                sparsities.push_back(
                    cell.result.outcome.report.sketch_sparsity_rate);
            }
            if (!any_ok) continue;
            const auto mean = [](const std::vector<double>& v) {
                return v.empty() ? 0.0
                                 : std::accumulate(v.begin(), v.end(), 0.0) /
                                       static_cast<double>(v.size());
            };
            SweepRow row;
            row.x = lambda;
            row.method = to_string(method);
            row.acc_mean = mean(pooled_acc);
            double var = 0.0;
            for (double a : pooled_acc) var += (a - row.acc_mean) * (a - row.acc_mean);
            row.acc_std = std::sqrt(var / static_cast<double>(pooled_acc.size()));
            row.sparsity = mean(sparsities);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

void write_bench_output(const BenchRunResult& result, ReportFormat format,
                        const std::string& path) {
    std::vector<std::string> comments = result.config_echo;
    for (const CellError& e : result.errors)
        comments.push_back("error: method=" + e.method + " r=" +
                           std::to_string(e.r) + " seed=" + std::to_string(e.seed) +
                           ": " + e.message);
    write_report(result.reports, format, path, comments);
}

namespace {

std::string format_4dp(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

void write_sweep_output(const SweepRunResult& result, ReportFormat format,
                        const std::string& path) {
    std::ofstream out(path);
    require(out.good(), ErrorKind::io, "cannot write '" + path + "'");
    if (format == ReportFormat::csv) {
        for (const std::string& line : result.config_echo)
            out << "# " << line << '\n';
        for (const CellError& e : result.errors)
            out << "# error: method=" << e.method << " seed=" << e.seed << ": "
                << e.message << '\n';
        out << "x,method,acc_mean,acc_std,sparsity\n";
        for (const SweepRow& row : result.rows)
            out << row.x << ',' << row.method << ',' << format_4dp(row.acc_mean)
                << ',' << format_4dp(row.acc_std) << ','
                << format_4dp(row.sparsity) << '\n';
    } else {
        nlohmann::json doc;
        doc["comments"] = result.config_echo;
        doc["rows"] = nlohmann::json::array();
        for (const SweepRow& row : result.rows)
            doc["rows"].push_back({{"x", row.x},
                                   {"method", row.method},
                                   {"acc_mean", row.acc_mean},
                                   {"acc_std", row.acc_std},
                                   {"sparsity", row.sparsity}});
        doc["errors"] = nlohmann::json::array();
        for (const CellError& e : result.errors)
            doc["errors"].push_back({{"method", e.method},
                                     {"r", e.r},
                                     {"seed", e.seed},
                                     {"message", e.message}});
        out << doc.dump(2) << '\n';
    }
    require(out.good(), ErrorKind::io, "write failed for '" + path + "'");
}

SketchCommandResult run_sketch(const ExperimentConfig& config) {
    require(!config.out.empty(), ErrorKind::invalid_argument,
            "sketch needs an output path");
    const Dataset ds = parse_libsvm(config.data);
    const Method method = config.methods.front();
    const index_t r = config.r_list.front();
    const std::uint64_t seed = config.seeds.front();

    auto sketcher = make_sketcher(
        method, r, params_from_config(config, config.lambda_list.front()));

    const auto start = std::chrono::steady_clock::now();
    const MatrixVariant sketched = sketcher->fit_transform(ds.features, seed);
    const double embed_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();

    const SparseMatrix carrier = std::holds_alternative<SparseMatrix>(sketched)
                                     ? std::get<SparseMatrix>(sketched)
                                     : sparsify(std::get<DenseMatrix>(sketched));
    std::vector<std::string> row_labels;
    row_labels.reserve(ds.labels.size());
    for (std::int32_t l : ds.labels)
        row_labels.push_back(ds.class_names[static_cast<std::size_t>(l)]);
    write_libsvm(carrier, row_labels, config.out);

    nlohmann::json sidecar;
    sidecar["method"] = to_string(method);
    sidecar["r"] = r;
    sidecar["seed"] = seed;
    sidecar["sparsity_rate"] = sparsity_rate(carrier);
    sidecar["embed_ms"] = embed_ms;
    sidecar["config"] = config.echo_lines();
    if (auto* baseline = dynamic_cast<BaselineSketcher*>(sketcher.get()))
        sidecar["model"] = nlohmann::json::parse(
            sketch_model_to_json(baseline->model()));
    else if (auto* esck = dynamic_cast<EsckSketcher*>(sketcher.get()))
        sidecar["model"] =
            nlohmann::json::parse(esck_model_to_json(esck->model()));

    SketchCommandResult result;
    result.output_path = config.out;
    result.sidecar_path = config.out + ".meta.json";
    result.sparsity = sparsity_rate(carrier);
    result.embed_ms = embed_ms;
    std::ofstream meta(result.sidecar_path);
    require(meta.good(), ErrorKind::io,
            "cannot write '" + result.sidecar_path + "'");
    meta << sidecar.dump(2) << '\n';
    return result;
}

} // namespace sketchbench
