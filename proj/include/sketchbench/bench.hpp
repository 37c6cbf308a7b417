#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sketchbench/classifier.hpp"
#include "sketchbench/esck.hpp"
#include "sketchbench/io.hpp"

namespace sketchbench {

// The benchmarked methods: the five oblivious/baseline transforms, the two
// data-dependent variants, and an identity passthrough used for harness
// checks.
enum class Method {
    gaussian,
    achlioptas,
    countsketch,
    srht,
    srht_topr,
    esck_full,
    esck_minibatch,
    identity,
};

std::string to_string(Method m);
Method method_from_string(const std::string& name);
bool is_esck(Method m);

struct MethodParams {
    double lambda = 10.0;
    double epsilon = 0.1;
    int iters = 20;
    index_t batch_size = 64;
    std::optional<double> eta;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::reseed_farthest;
    bool countsketch_sqrt_s = false;
};

std::unique_ptr<Sketcher> make_sketcher(Method method, index_t r,
                                        const MethodParams& params);

// Rebuilds a fitted sketcher from a model blob produced by
// Sketcher::to_json (baseline and esck kinds).
std::unique_ptr<Sketcher> sketcher_from_json(const std::string& blob);

struct ExperimentConfig {
    std::string data;
    std::vector<Method> methods;
    std::vector<index_t> r_list;
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> lambda_list{10.0};
    double epsilon = 0.1;
    int iters = 20;
    index_t batch_size = 64;
    std::vector<double> c_grid;
    int folds = 5;
    bool scale_minmax = false;
    std::string out;
    ReportFormat format = ReportFormat::csv;
    int jobs = 1;
    std::string sweep; // "", "r" or "lambda"

    // The SVM regularizer grid 10^-5 .. 10^5 used when c_grid is empty.
    std::vector<double> effective_c_grid() const;
    // Deterministic "key = value" lines echoed into every output file.
    std::vector<std::string> echo_lines() const;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct CellError {
    std::string method;
    index_t r = 0;
    std::uint64_t seed = 0;
    std::string message;
};

struct BenchRunResult {
    std::vector<BenchReport> reports; // one row per (method, r)
    std::vector<CellError> errors;
    std::vector<std::string> config_echo;
};

// Runs cross-validation for every (method, r, seed) cell and aggregates over
// seeds: accuracy mean/std are pooled over seeds x folds. For the esck
// methods lambda is grid-searched over lambda_list within each cell by CV
// mean accuracy. Failed cells are recorded and the run continues.
BenchRunResult run_bench(const ExperimentConfig& config);

struct SweepRow {
    double x = 0.0;
    std::string method;
    double acc_mean = 0.0;
    double acc_std = 0.0;
    double sparsity = 0.0;
};

struct SweepRunResult {
    std::vector<SweepRow> rows;
    std::vector<CellError> errors;
    std::vector<std::string> config_echo;
};

// sweep = "r": one row per (method, r). sweep = "lambda": one row per
// (method, lambda); methods that ignore lambda repeat their result on every
// lambda row.
SweepRunResult run_sweep(const ExperimentConfig& config);

void write_bench_output(const BenchRunResult& result, ReportFormat format,
                        const std::string& path);
void write_sweep_output(const SweepRunResult& result, ReportFormat format,
                        const std::string& path);

struct SketchCommandResult {
    std::string output_path;
    std::string sidecar_path;
    double sparsity = 0.0;
    double embed_ms = 0.0;
};

// Sketches the whole input file with the first (method, r, seed, lambda) of
// the config, writes the embedding in LIBSVM form to config.out plus a JSON
// sidecar with the fitted model blob.
SketchCommandResult run_sketch(const ExperimentConfig& config);

} // namespace sketchbench
