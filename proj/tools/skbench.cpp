// Benchmark CLI. All functionality is reached through the C API in
// sketchbench.h; this binary only parses options, builds the config JSON and
// renders results.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sketchbench.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitPartialFailure = 2;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Flat "key = value" config file; '#' starts a comment, lists are
// comma-separated.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw CLI::ValidationError("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("bad config line: " + line);
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

struct Options {
    std::string config_path;
    std::string data;
    std::vector<std::string> methods;
    std::vector<std::int64_t> r;
    std::vector<std::uint64_t> seeds;
    std::vector<double> lambda;
    double epsilon = 0.1;
    int iters = 20;
    std::int64_t batch_size = 64;
    std::vector<double> c_grid;
    int folds = 5;
    std::string scale;
    std::string out;
    std::string format;
    int jobs = 1;
    std::string sweep;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path,
                    "config file (flat key = value lines; flags win)");
    cmd->add_option("--data", opt.data, "input dataset (LIBSVM text format)");
    cmd->add_option("--method", opt.methods,
                    "methods: gaussian achlioptas countsketch srht srht_topr "
                    "esck_full esck_minibatch")
        ->delimiter(',');
    cmd->add_option("--r", opt.r, "projection dimension(s)")->delimiter(',');
    cmd->add_option("--seeds", opt.seeds, "random seeds")->delimiter(',');
    cmd->add_option("--lambda", opt.lambda, "L1 ball radius grid (esck)")
        ->delimiter(',');
    cmd->add_option("--epsilon", opt.epsilon, "L1 projection band tolerance");
    cmd->add_option("--iters", opt.iters, "esck iterations");
    cmd->add_option("--batch-size", opt.batch_size, "esck mini-batch size");
    cmd->add_option("--c-grid", opt.c_grid, "SVM C grid")->delimiter(',');
    cmd->add_option("--folds", opt.folds, "cross-validation folds");
    cmd->add_option("--scale", opt.scale, "feature scaling: none | minmax");
    cmd->add_option("--out", opt.out, "output path");
    cmd->add_option("--format", opt.format, "output format: csv | json");
    cmd->add_option("--jobs", opt.jobs, "parallel cells");
}

// Merge config-file values and flags into the config JSON; a flag given on
// the command line always wins over the file.
std::string build_config_json(const CLI::App* cmd, const Options& opt) {
    std::map<std::string, std::string> file;
    if (!opt.config_path.empty()) file = read_config_file(opt.config_path);

    const auto flag_given = [cmd](const std::string& name) {
        return cmd->count(name) > 0;
    };
    const auto file_value = [&file](const std::string& key) -> const std::string* {
        auto it = file.find(key);
        return it == file.end() ? nullptr : &it->second;
    };

    nlohmann::json cfg;

    const auto set_string = [&](const std::string& flag, const std::string& key,
                                const std::string& value) {
        if (flag_given(flag))
            cfg[key] = value;
        else if (const std::string* v = file_value(key))
            cfg[key] = *v;
    };
    set_string("--data", "data", opt.data);
    set_string("--out", "out", opt.out);
    set_string("--format", "format", opt.format);
    set_string("--scale", "scale", opt.scale);

    if (flag_given("--method")) {
        cfg["methods"] = opt.methods;
    } else if (const std::string* v = file_value("method")) {
        cfg["methods"] = split_list(*v);
    }

    const auto set_number_list = [&](const std::string& flag,
                                     const std::string& key, const auto& values,
                                     auto parse) {
        if (flag_given(flag)) {
            cfg[key] = values;
        } else if (const std::string* v = file_value(key)) {
            std::vector<decltype(parse(std::string{}))> parsed;
            for (const std::string& item : split_list(*v))
                parsed.push_back(parse(item));
            cfg[key] = parsed;
        }
    };
    set_number_list("--r", "r", opt.r,
                    [](const std::string& s) { return std::stoll(s); });
    set_number_list("--seeds", "seeds", opt.seeds, [](const std::string& s) {
        return static_cast<std::uint64_t>(std::stoull(s));
    });
    set_number_list("--lambda", "lambda", opt.lambda,
                    [](const std::string& s) { return std::stod(s); });
    set_number_list("--c-grid", "c_grid", opt.c_grid,
                    [](const std::string& s) { return std::stod(s); });

    const auto set_scalar = [&](const std::string& flag, const std::string& key,
                                const auto& value, auto parse) {
        if (flag_given(flag))
            cfg[key] = value;
        else if (const std::string* v = file_value(key))
            cfg[key] = parse(*v);
    };
    set_scalar("--epsilon", "epsilon", opt.epsilon,
               [](const std::string& s) { return std::stod(s); });
    set_scalar("--iters", "iters", opt.iters,
               [](const std::string& s) { return std::stoi(s); });
    set_scalar("--batch-size", "batch_size", opt.batch_size,
               [](const std::string& s) { return std::stoll(s); });
    set_scalar("--folds", "folds", opt.folds,
               [](const std::string& s) { return std::stoi(s); });
    set_scalar("--jobs", "jobs", opt.jobs,
               [](const std::string& s) { return std::stoi(s); });

    if (!opt.sweep.empty()) cfg["sweep"] = opt.sweep;
    if (const std::string* v = file_value("sweep"); v && !cfg.contains("sweep"))
        cfg["sweep"] = *v;

    return cfg.dump();
}

int fail_with_last_error(const std::string& what) {
    std::cerr << "error: " << what << ": " << skb_last_error() << '\n';
    return kExitConfigError;
}

int run_sketch_command(const CLI::App* cmd, const Options& opt) {
    const std::string config = build_config_json(cmd, opt);
    char* result = nullptr;
    if (skb_sketch_file(config.c_str(), &result) != SKB_OK)
        return fail_with_last_error("sketch");
    const nlohmann::json doc = nlohmann::json::parse(result);
    skb_string_free(result);
    std::cout << "wrote " << doc.at("output_path").get<std::string>() << " ("
              << "sparsity " << doc.at("sparsity").get<double>() << ", "
              << doc.at("embed_ms").get<double>() << " ms)\n"
              << "sidecar " << doc.at("sidecar_path").get<std::string>() << '\n';
    return kExitOk;
}

int run_table_command(const CLI::App* cmd, const Options& opt, bool sweep) {
    const std::string config = build_config_json(cmd, opt);
    char* result = nullptr;
    const skb_status status =
        sweep ? skb_sweep_run(config.c_str(), &result)
              : skb_bench_run(config.c_str(), &result);
    if (status != SKB_OK) return fail_with_last_error(sweep ? "sweep" : "bench");

    const nlohmann::json doc = nlohmann::json::parse(result);

    const nlohmann::json parsed_cfg = nlohmann::json::parse(config);
    const std::string out_path = parsed_cfg.value("out", "");
    const std::string format = parsed_cfg.value("format", "csv");
    if (out_path.empty()) {
        std::cerr << "error: no output path (use --out)\n";
        skb_string_free(result);
        return kExitConfigError;
    }
    if (skb_result_write(result, format.c_str(), out_path.c_str()) != SKB_OK) {
        skb_string_free(result);
        return fail_with_last_error("write");
    }
    skb_string_free(result);

    const auto& rows = sweep ? doc.at("rows") : doc.at("reports");
    std::cout << "wrote " << out_path << " (" << rows.size() << " rows)\n";
    for (const auto& row : rows) {
        if (sweep)
            std::cout << "  x=" << row.at("x").get<double>() << " "
                      << row.at("method").get<std::string>();
        else
            std::cout << "  " << row.at("method").get<std::string>()
                      << " r=" << row.at("r").get<std::int64_t>();
        std::cout << " acc=" << row.at("acc_mean").get<double>() << "±"
                  << row.at("acc_std").get<double>()
                  << " sparsity=" << row.at("sparsity").get<double>() << '\n';
    }
    const auto& errors = doc.at("errors");
    for (const auto& e : errors)
        std::cerr << "cell failed: method=" << e.at("method").get<std::string>()
                  << " seed=" << e.at("seed").get<std::uint64_t>() << ": "
                  << e.at("message").get<std::string>() << '\n';
    return errors.empty() ? kExitOk : kExitPartialFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse matrix sketching benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", skb_version());

    Options sketch_opt, bench_opt, sweep_opt;

    CLI::App* sketch = app.add_subcommand(
        "sketch", "sketch a dataset and write the embedding + model sidecar");
    add_common_flags(sketch, sketch_opt);

    CLI::App* bench = app.add_subcommand(
        "bench", "cross-validated accuracy/sparsity/timing comparison");
    add_common_flags(bench, bench_opt);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "parameter sweep emitting a tidy curve file");
    add_common_flags(sweep, sweep_opt);
    sweep->add_option("--sweep", sweep_opt.sweep, "sweep variable: r | lambda")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (sketch->parsed()) return run_sketch_command(sketch, sketch_opt);
        if (bench->parsed()) return run_table_command(bench, bench_opt, false);
        if (sweep->parsed()) return run_table_command(sweep, sweep_opt, true);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}
