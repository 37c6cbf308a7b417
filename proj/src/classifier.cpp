#include "sketchbench/classifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "sketchbench/rng.hpp"

namespace sketchbench {

namespace {

// Row accessors shared by the sparse and dense training paths. The bias is
// an appended constant feature living at slot `dim` of the weight vector.
struct SparseRows {
    const CsrView& view;

    index_t rows() const { return view.rows; }

    double dot(index_t i, std::span<const double> w) const {
        auto ids = view.row_indices(i);
        auto vals = view.row_values(i);
        double acc = w[w.size() - 1]; // bias feature
        for (std::size_t k = 0; k < ids.size(); ++k)
            acc += vals[k] * w[static_cast<std::size_t>(ids[k])];
        return acc;
    }

    void axpy(index_t i, double a, std::span<double> w) const {
        auto ids = view.row_indices(i);
        auto vals = view.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            w[static_cast<std::size_t>(ids[k])] += a * vals[k];
        w[w.size() - 1] += a;
    }

    double sq_norm(index_t i) const {
        double acc = 1.0;
        for (double v : view.row_values(i)) acc += v * v;
        return acc;
    }
};

struct DenseRows {
    const DenseMatrix& m;

    index_t rows() const { return m.rows(); }

    double dot(index_t i, std::span<const double> w) const {
        auto row = m.row(i);
        double acc = w[w.size() - 1];
        for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * w[k];
        return acc;
    }

    void axpy(index_t i, double a, std::span<double> w) const {
        auto row = m.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) w[k] += a * row[k];
        w[w.size() - 1] += a;
    }

    double sq_norm(index_t i) const {
        double acc = 1.0;
        for (double v : m.row(i)) acc += v * v;
        return acc;
    }
};

template <typename Rows>
std::vector<double> dcd_binary(const Rows& rows, std::span<const double> y,
                               index_t dim, double c_value, Rng& rng,
                               const SvmOptions& options) {
    const auto n = static_cast<std::size_t>(rows.rows());
    const double c_per_sample = c_value / static_cast<double>(n);

    std::vector<double> w(static_cast<std::size_t>(dim) + 1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> q_diag(n);
    for (std::size_t i = 0; i < n; ++i)
        q_diag[i] = rows.sq_norm(static_cast<index_t>(i));

    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});

    for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);

        for (index_t i : order) {
            const auto iu = static_cast<std::size_t>(i);
            const double g = y[iu] * rows.dot(i, w) - 1.0;
            double pg = g;
            if (alpha[iu] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[iu] >= c_per_sample)
                pg = std::max(g, 0.0);
            if (std::abs(pg) < 1e-12) continue;
            const double old = alpha[iu];
            alpha[iu] = std::clamp(old - g / q_diag[iu], 0.0, c_per_sample);
            if (alpha[iu] != old) rows.axpy(i, (alpha[iu] - old) * y[iu], w);
        }

        double w_sq = 0.0;
        for (double v : w) w_sq += v * v;
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            hinge += std::max(0.0, 1.0 - y[i] * rows.dot(static_cast<index_t>(i), w));
        const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
        const double primal = 0.5 * w_sq + c_per_sample * hinge;
        const double dual = alpha_sum - 0.5 * w_sq;
        if (primal - dual <=
            options.duality_gap_tol * std::max(1.0, std::abs(primal)))
            break;
    }
    return w;
}

template <typename Rows>
LinearModel train_ovr(const Rows& rows, index_t dim,
                      const std::vector<std::int32_t>& labels,
                      index_t class_count, double c_value, std::uint64_t seed,
                      const SvmOptions& options) {
    const auto n = static_cast<std::size_t>(rows.rows());
    DenseMatrix weights(class_count, dim);
    std::vector<double> bias(static_cast<std::size_t>(class_count), 0.0);
    std::vector<double> y(n);
    for (index_t c = 0; c < class_count; ++c) {
        for (std::size_t i = 0; i < n; ++i)
            y[i] = labels[i] == static_cast<std::int32_t>(c) ? 1.0 : -1.0;
        Rng rng = Rng::derive(seed, "svm/class/" + std::to_string(c));
        const std::vector<double> w =
            dcd_binary(rows, y, dim, c_value, rng, options);
        auto row = weights.row(c);
        for (index_t k = 0; k < dim; ++k)
            row[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)];
        bias[static_cast<std::size_t>(c)] = w[static_cast<std::size_t>(dim)];
    }
    LinearModel model;
    model.weights = std::move(weights);
    model.bias = std::move(bias);
    model.dim = dim;
    return model;
}

void check_training_inputs(index_t n, const std::vector<std::int32_t>& labels,
                           index_t class_count, double c_value) {
    require(n >= 2, ErrorKind::invalid_argument,
            "training needs at least 2 samples");
    require(labels.size() == static_cast<std::size_t>(n),
            ErrorKind::invalid_argument, "label count does not match rows");
    require(c_value > 0.0, ErrorKind::invalid_argument, "C must be positive");
    require(class_count >= 2, ErrorKind::invalid_argument,
            "training needs at least 2 classes");
    std::set<std::int32_t> seen(labels.begin(), labels.end());
    require(seen.size() >= 2, ErrorKind::invalid_argument,
            "single-class input");
    for (std::int32_t c : seen)
        require(c >= 0 && c < class_count, ErrorKind::invalid_argument,
                "label outside [0, class_count)");
}

} // namespace

LinearModel train_linear_svm(const MatrixVariant& features,
                             const std::vector<std::int32_t>& labels,
                             index_t class_count, double c_value,
                             std::uint64_t seed, const SvmOptions& options) {
    return std::visit(
        [&](const auto& m) {
            check_training_inputs(m.rows(), labels, class_count, c_value);
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, SparseMatrix>) {
                const CsrView view = make_row_view(m);
                return train_ovr(SparseRows{view}, m.cols(), labels, class_count,
                                 c_value, seed, options);
            } else {
                return train_ovr(DenseRows{m}, m.cols(), labels, class_count,
                                 c_value, seed, options);
            }
        },
        features);
}

namespace {

std::int32_t argmax_score(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return static_cast<std::int32_t>(best);
}

} // namespace

std::vector<std::int32_t> predict(const LinearModel& model,
                                  const MatrixVariant& features,
                                  PredictStats* stats) {
    const index_t classes = model.classes();
    std::vector<double> scores(static_cast<std::size_t>(classes));
    std::vector<std::int32_t> out;
    std::uint64_t ops = 0;

    if (const auto* sparse = std::get_if<SparseMatrix>(&features)) {
        require(sparse->cols() == model.dim, ErrorKind::shape,
                "feature dimension does not match model");
        const CsrView view = make_row_view(*sparse);
        out.reserve(static_cast<std::size_t>(view.rows));
        for (index_t i = 0; i < view.rows; ++i) {
            auto ids = view.row_indices(i);
            auto vals = view.row_values(i);
            for (index_t c = 0; c < classes; ++c) {
                double acc = model.bias[static_cast<std::size_t>(c)];
                auto w = model.weights.row(c);
                for (std::size_t k = 0; k < ids.size(); ++k)
                    acc += vals[k] * w[static_cast<std::size_t>(ids[k])];
                scores[static_cast<std::size_t>(c)] = acc;
                ops += ids.size() + 1;
            }
            out.push_back(argmax_score(scores));
        }
    } else {
        const auto& dense = std::get<DenseMatrix>(features);
        require(dense.cols() == model.dim, ErrorKind::shape,
                "feature dimension does not match model");
        out.reserve(static_cast<std::size_t>(dense.rows()));
        for (index_t i = 0; i < dense.rows(); ++i) {
            auto row = dense.row(i);
            for (index_t c = 0; c < classes; ++c) {
                double acc = model.bias[static_cast<std::size_t>(c)];
                auto w = model.weights.row(c);
                for (std::size_t k = 0; k < row.size(); ++k) acc += row[k] * w[k];
                scores[static_cast<std::size_t>(c)] = acc;
                ops += row.size() + 1;
            }
            out.push_back(argmax_score(scores));
        }
    }
    if (stats) stats->multiply_adds += ops;
    return out;
}

double accuracy(const LinearModel& model, const MatrixVariant& features,
                const std::vector<std::int32_t>& labels) {
    const std::vector<std::int32_t> predicted = predict(model, features);
    require(predicted.size() == labels.size(), ErrorKind::invalid_argument,
            "label count does not match rows");
    if (predicted.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::string linear_model_to_json(const LinearModel& model) {
    nlohmann::json j;
    j["format"] = "sketchbench.model";
    j["version"] = 1;
    j["kind"] = "linear_model";
    j["dim"] = model.dim;
    j["classes"] = model.classes();
    j["weights"] = model.weights.values();
    j["bias"] = model.bias;
    return j.dump();
}

LinearModel linear_model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad model JSON: ") + e.what());
    }
    require(j.value("format", "") == "sketchbench.model" &&
                j.value("kind", "") == "linear_model",
            ErrorKind::parse, "not a linear model blob");
    LinearModel model;
    model.dim = j.at("dim").get<index_t>();
    const auto classes = j.at("classes").get<index_t>();
    model.weights = DenseMatrix(classes, model.dim,
                                j.at("weights").get<std::vector<double>>());
    model.bias = j.at("bias").get<std::vector<double>>();
    require(model.bias.size() == static_cast<std::size_t>(classes),
            ErrorKind::parse, "bias length mismatch");
    return model;
}

std::string Sketcher::to_json() const {
    throw Error(ErrorKind::invalid_argument,
                "sketcher '" + name() + "' has no serializable form");
}

std::vector<std::vector<index_t>> make_folds(const std::vector<std::int32_t>& labels,
                                             int folds, std::uint64_t seed,
                                             bool stratified) {
    require(folds >= 2, ErrorKind::invalid_argument, "need at least 2 folds");
    require(labels.size() >= static_cast<std::size_t>(folds),
            ErrorKind::invalid_argument, "fewer samples than folds");
    const auto n = static_cast<index_t>(labels.size());
    Rng rng = Rng::derive(seed, "cv/folds");

    std::vector<std::vector<index_t>> out(static_cast<std::size_t>(folds));
    if (!stratified) {
        std::vector<index_t> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), index_t{0});
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_below(i)]);
        for (std::size_t i = 0; i < order.size(); ++i)
            out[i % static_cast<std::size_t>(folds)].push_back(order[i]);
        for (auto& fold : out) std::sort(fold.begin(), fold.end());
        return out;
    }

    // Per class: an equal share per fold, remainders placed on the currently
    // least-filled folds so the global sizes stay within one of each other.
    std::int32_t max_label = 0;
    for (std::int32_t l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<index_t>> by_class(
        static_cast<std::size_t>(max_label) + 1);
    for (index_t i = 0; i < n; ++i)
        by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]
            .push_back(i);

    std::vector<index_t> fold_sizes(static_cast<std::size_t>(folds), 0);
    for (auto& members : by_class) {
        for (std::size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[rng.next_below(i)]);
        const auto share = static_cast<index_t>(members.size()) / folds;
        const auto extras = static_cast<index_t>(members.size()) % folds;

        std::vector<index_t> fold_order(static_cast<std::size_t>(folds));
        std::iota(fold_order.begin(), fold_order.end(), index_t{0});
        std::stable_sort(fold_order.begin(), fold_order.end(),
                         [&fold_sizes](index_t a, index_t b) {
                             return fold_sizes[static_cast<std::size_t>(a)] <
                                    fold_sizes[static_cast<std::size_t>(b)];
                         });

        std::size_t cursor = 0;
        for (index_t rank = 0; rank < folds; ++rank) {
            const auto f = static_cast<std::size_t>(
                fold_order[static_cast<std::size_t>(rank)]);
            const index_t take = share + (rank < extras ? 1 : 0);
            for (index_t k = 0; k < take; ++k)
                out[f].push_back(members[cursor++]);
            fold_sizes[f] += take;
        }
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

SparseMatrix select_rows(const SparseMatrix& m, std::span<const index_t> rows) {
    std::vector<index_t> position(static_cast<std::size_t>(m.rows()), -1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k] >= 0 && rows[k] < m.rows(), ErrorKind::invalid_argument,
                "row index out of range");
        position[static_cast<std::size_t>(rows[k])] = static_cast<index_t>(k);
    }
    std::vector<Triplet> triplets;
    for (index_t j = 0; j < m.cols(); ++j) {
        auto ids = m.column_indices(j);
        auto vals = m.column_values(j);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const index_t pos = position[static_cast<std::size_t>(ids[k])];
            if (pos >= 0) triplets.push_back({pos, j, vals[k]});
        }
    }
    return SparseMatrix::from_triplets(static_cast<index_t>(rows.size()),
                                       m.cols(), triplets);
}

DenseMatrix select_rows(const DenseMatrix& m, std::span<const index_t> rows) {
    DenseMatrix out(static_cast<index_t>(rows.size()), m.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k] >= 0 && rows[k] < m.rows(), ErrorKind::invalid_argument,
                "row index out of range");
        auto src = m.row(rows[k]);
        auto dst = out.row(static_cast<index_t>(k));
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

MatrixVariant select_rows(const MatrixVariant& m, std::span<const index_t> rows) {
    return std::visit(
        [rows](const auto& mm) -> MatrixVariant { return select_rows(mm, rows); },
        m);
}

namespace {

std::vector<std::int32_t> select_labels(const std::vector<std::int32_t>& labels,
                                        std::span<const index_t> rows) {
    std::vector<std::int32_t> out;
    out.reserve(rows.size());
    for (index_t i : rows) out.push_back(labels[static_cast<std::size_t>(i)]);
    return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
}

// Stratified 80/20 split of [0, n) by label, for the inner C selection.
std::pair<std::vector<index_t>, std::vector<index_t>>
holdout_split(const std::vector<std::int32_t>& labels, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, "cv/holdout");
    std::int32_t max_label = 0;
    for (std::int32_t l : labels) max_label = std::max(max_label, l);
    std::vector<std::vector<index_t>> by_class(
        static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[static_cast<std::size_t>(labels[i])].push_back(
            static_cast<index_t>(i));
    std::vector<index_t> train_idx, eval_idx;
    for (auto& members : by_class) {
        for (std::size_t i = members.size(); i > 1; --i)
            std::swap(members[i - 1], members[rng.next_below(i)]);
        const auto keep = static_cast<std::size_t>(
            std::ceil(0.8 * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < keep ? train_idx : eval_idx).push_back(members[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(eval_idx.begin(), eval_idx.end());
    return {std::move(train_idx), std::move(eval_idx)};
}

double select_c(const MatrixVariant& train_embedding,
                const std::vector<std::int32_t>& train_labels,
                index_t class_count, const std::vector<double>& c_grid,
                std::uint64_t seed) {
    if (c_grid.size() == 1) return c_grid.front();
    auto [inner_train, inner_eval] = holdout_split(train_labels, seed);
    if (inner_eval.empty()) return c_grid.front();
    const MatrixVariant x_inner = select_rows(train_embedding, inner_train);
    const MatrixVariant x_eval = select_rows(train_embedding, inner_eval);
    const std::vector<std::int32_t> y_inner = select_labels(train_labels, inner_train);
    const std::vector<std::int32_t> y_eval = select_labels(train_labels, inner_eval);

    double best_c = c_grid.front();
    double best_acc = -1.0;
    for (double c : c_grid) {
        const LinearModel model =
            train_linear_svm(x_inner, y_inner, class_count, c, seed);
        const double acc = accuracy(model, x_eval, y_eval);
        if (acc > best_acc) {
            best_acc = acc;
            best_c = c;
        }
    }
    return best_c;
}

} // namespace

CvOutcome cross_validate(const Dataset& ds, Sketcher& sketcher,
                         const std::vector<double>& c_grid, const CvPlan& plan,
                         const CvOptions& options) {
    require(!c_grid.empty(), ErrorKind::invalid_argument, "empty C grid");
    const auto folds =
        make_folds(ds.labels, plan.folds, plan.seed, plan.stratified);

    std::vector<double> fold_accuracies;
    std::vector<double> embed_times, predict_times, sparsities;
    std::string selected_cs;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<index_t> train_idx;
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        std::sort(train_idx.begin(), train_idx.end());
        const std::vector<index_t>& test_idx = folds[f];

        SparseMatrix x_train = select_rows(ds.features, train_idx);
        SparseMatrix x_test = select_rows(ds.features, test_idx);
        const std::vector<std::int32_t> y_train = select_labels(ds.labels, train_idx);
        const std::vector<std::int32_t> y_test = select_labels(ds.labels, test_idx);

        std::set<std::int32_t> train_classes(y_train.begin(), y_train.end());
        require(static_cast<index_t>(train_classes.size()) == ds.class_count,
                ErrorKind::invalid_argument,
                "training fold is missing a class");

        if (options.scale_minmax) {
            const MinMaxStats stats = fit_minmax(x_train);
            x_train = apply_minmax_pm1(x_train, stats);
            x_test = apply_minmax_pm1(x_test, stats);
        }

        const std::uint64_t fold_seed =
            Rng::derive(plan.seed, "cv/fold/" + std::to_string(f)).next_u64();

        const auto embed_start = std::chrono::steady_clock::now();
        const MatrixVariant train_embedding =
            sketcher.fit_transform(x_train, fold_seed);
        embed_times.push_back(elapsed_ms(embed_start));
        sparsities.push_back(sparsity_rate(train_embedding));

        const double best_c = select_c(train_embedding, y_train, ds.class_count,
                                       c_grid, fold_seed);
        if (!selected_cs.empty()) selected_cs += ",";
        selected_cs += std::to_string(best_c);

        const LinearModel model = train_linear_svm(
            train_embedding, y_train, ds.class_count, best_c, fold_seed);

        const MatrixVariant test_embedding = sketcher.transform(x_test);
        fold_accuracies.push_back(accuracy(model, test_embedding, y_test));

        std::vector<double> repeats;
        for (int rep = 0; rep < 5; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const MatrixVariant embedded = sketcher.transform(x_test);
            (void)predict(model, embedded);
            repeats.push_back(elapsed_ms(start));
        }
        std::sort(repeats.begin(), repeats.end());
        const double per_sample_us =
            repeats[repeats.size() / 2] * 1000.0 /
            static_cast<double>(std::max<index_t>(1, x_test.rows()));
        predict_times.push_back(per_sample_us);
    }

    const auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0
                         : std::accumulate(v.begin(), v.end(), 0.0) /
                               static_cast<double>(v.size());
    };
    const double acc_mean = mean(fold_accuracies);
    double acc_var = 0.0;
    for (double a : fold_accuracies) acc_var += (a - acc_mean) * (a - acc_mean);
    acc_var /= static_cast<double>(fold_accuracies.size());

    CvOutcome outcome;
    outcome.fold_accuracies = fold_accuracies;
    outcome.report.dataset =
        options.dataset_id.empty() ? ds.source : options.dataset_id;
    outcome.report.method = sketcher.name();
    outcome.report.r = sketcher.output_dim();
    outcome.report.accuracy_mean = acc_mean;
    outcome.report.accuracy_std = std::sqrt(acc_var);
    outcome.report.sketch_sparsity_rate = mean(sparsities);
    outcome.report.embed_ms = mean(embed_times);
    outcome.report.predict_us = mean(predict_times);
    outcome.report.hyperparameters["selected_c"] = selected_cs;
    return outcome;
}

} // namespace sketchbench
