#include "sketchbench/sketchers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "sketchbench/rng.hpp"

namespace sketchbench {

std::string to_string(SketchMethod m) {
    switch (m) {
    case SketchMethod::gaussian: return "gaussian";
    case SketchMethod::achlioptas: return "achlioptas";
    case SketchMethod::countsketch: return "countsketch";
    case SketchMethod::srht: return "srht";
    case SketchMethod::srht_topr: return "srht_topr";
    }
    throw Error(ErrorKind::internal, "unknown sketch method");
}

SketchMethod sketch_method_from_string(const std::string& name) {
    if (name == "gaussian") return SketchMethod::gaussian;
    if (name == "achlioptas") return SketchMethod::achlioptas;
    if (name == "countsketch") return SketchMethod::countsketch;
    if (name == "srht") return SketchMethod::srht;
    if (name == "srht_topr") return SketchMethod::srht_topr;
    throw Error(ErrorKind::invalid_argument, "unknown sketch method '" + name + "'");
}

bool payload_equal(const SketchModel& a, const SketchModel& b) {
    if (a.method != b.method || a.d != b.d || a.r != b.r) return false;
    if (a.payload.index() != b.payload.index()) return false;
    return std::visit(
        [&b](const auto& pa) {
            using P = std::decay_t<decltype(pa)>;
            const auto& pb = std::get<P>(b.payload);
            if constexpr (std::is_same_v<P, DenseMatrix>)
                return pa.rows() == pb.rows() && pa.cols() == pb.cols() &&
                       pa.values() == pb.values();
            else
                return pa == pb;
        },
        a.payload);
}

namespace {

void check_dims(index_t d, index_t r) {
    require(d > 0 && r > 0, ErrorKind::invalid_argument,
            "dimensions must be positive");
    require(r < d, ErrorKind::invalid_argument,
            "reduced dimension r must be smaller than d");
}

SignDiagonal draw_signs(Rng& rng, index_t dim) {
    SignDiagonal d;
    d.dim = dim;
    d.signs.resize(static_cast<std::size_t>(dim));
    for (auto& s : d.signs) s = static_cast<std::int8_t>(rng.next_sign());
    return d;
}

} // namespace

SketchModel fit_gaussian(index_t d, index_t r, std::uint64_t seed) {
    check_dims(d, r);
    Rng rng = Rng::derive(seed, "gaussian");
    const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<double> values(static_cast<std::size_t>(d * r));
    for (double& v : values) v = stddev * rng.next_gaussian();
    return {SketchMethod::gaussian, d, r, seed,
            DenseMatrix(d, r, std::move(values))};
}

SketchModel fit_achlioptas(index_t d, index_t r, std::uint64_t seed) {
    check_dims(d, r);
    Rng rng = Rng::derive(seed, "achlioptas");
    // Entries sqrt(3/d) * s with s in {+1, 0, -1} at probabilities
    // {1/6, 2/3, 1/6}; entry variance is 1/d.
    const double scale = std::sqrt(3.0 / static_cast<double>(d));
    std::vector<double> values(static_cast<std::size_t>(d * r), 0.0);
    for (double& v : values) {
        const double u = rng.next_uniform();
        if (u < 1.0 / 6.0)
            v = scale;
        else if (u < 1.0 / 3.0)
            v = -scale;
    }
    return {SketchMethod::achlioptas, d, r, seed,
            DenseMatrix(d, r, std::move(values))};
}

SketchModel fit_countsketch(index_t d, index_t r, std::uint64_t seed,
                            bool scale_by_sqrt_s) {
    check_dims(d, r);
    Rng rng = Rng::derive(seed, "countsketch");
    CountSketchPayload payload;
    payload.signs = draw_signs(rng, d);
    payload.hash.resize(static_cast<std::size_t>(d));
    for (auto& h : payload.hash)
        h = static_cast<std::int32_t>(rng.next_below(static_cast<std::uint64_t>(r)));
    payload.scale_by_sqrt_s = scale_by_sqrt_s;
    return {SketchMethod::countsketch, d, r, seed, std::move(payload)};
}

void fwht(std::span<double> data) {
    const std::size_t n = data.size();
    require(n > 0 && std::has_single_bit(n), ErrorKind::invalid_argument,
            "transform length must be a power of two");
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += h << 1) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double a = data[j];
                const double b = data[j + h];
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
    }
}

namespace {

// Uniform sample of `count` values from [0, n) without replacement
// (partial Fisher-Yates), returned sorted.
std::vector<index_t> sample_without_replacement(Rng& rng, index_t n,
                                                index_t count) {
    std::vector<index_t> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), index_t{0});
    for (index_t i = 0; i < count; ++i) {
        const auto pick = i + static_cast<index_t>(rng.next_below(
                                  static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[static_cast<std::size_t>(pick)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());
    return pool;
}

SrhtPayload make_srht_payload(Rng& rng, index_t d, index_t r) {
    SrhtPayload payload;
    payload.signs = draw_signs(rng, d);
    payload.padded_dim =
        static_cast<index_t>(std::bit_ceil(static_cast<std::uint64_t>(d)));
    payload.selected = sample_without_replacement(rng, payload.padded_dim, r);
    payload.scale = 1.0 / std::sqrt(static_cast<double>(r));
    return payload;
}

} // namespace

SketchModel fit_srht(index_t d, index_t r, std::uint64_t seed) {
    check_dims(d, r);
    Rng rng = Rng::derive(seed, "srht");
    return {SketchMethod::srht, d, r, seed, make_srht_payload(rng, d, r)};
}

SketchModel fit_srht_topr(index_t d, index_t r, std::uint64_t seed,
                          const SparseMatrix& x_train) {
    check_dims(d, r);
    require(x_train.rows() > 0, ErrorKind::invalid_argument,
            "training matrix must be nonempty");
    require(x_train.cols() == d, ErrorKind::shape,
            "training matrix dimension mismatch");
    Rng rng = Rng::derive(seed, "srht_topr");
    SrhtPayload payload = make_srht_payload(rng, d, r);

    // Replace the uniform selection by the r transformed coordinates with the
    // largest column energy of X * D * H over the training split.
    const auto padded = static_cast<std::size_t>(payload.padded_dim);
    std::vector<double> energy(padded, 0.0);
    std::vector<double> scratch(padded);
    const CsrView rows = make_row_view(x_train);
    for (index_t i = 0; i < rows.rows; ++i) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        auto ids = rows.row_indices(i);
        auto vals = rows.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            scratch[static_cast<std::size_t>(ids[k])] =
                vals[k] * payload.signs.signs[static_cast<std::size_t>(ids[k])];
        fwht(scratch);
        for (std::size_t k = 0; k < padded; ++k)
            energy[k] += scratch[k] * scratch[k];
    }
    std::vector<index_t> order(padded);
    std::iota(order.begin(), order.end(), index_t{0});
    std::stable_sort(order.begin(), order.end(), [&energy](index_t a, index_t b) {
        return energy[static_cast<std::size_t>(a)] >
               energy[static_cast<std::size_t>(b)];
    });
    order.resize(static_cast<std::size_t>(r));
    std::sort(order.begin(), order.end());
    payload.selected = std::move(order);
    return {SketchMethod::srht_topr, d, r, seed, std::move(payload)};
}

namespace {

MatrixVariant apply_dense_r(const SketchModel& model, const SparseMatrix& x) {
    return multiply(x, std::get<DenseMatrix>(model.payload));
}

MatrixVariant apply_dense_r(const SketchModel& model, const DenseMatrix& x) {
    return multiply(x, std::get<DenseMatrix>(model.payload));
}

std::vector<double> countsketch_output_scale(const CountSketchPayload& p,
                                             index_t r) {
    std::vector<double> scale(static_cast<std::size_t>(r), 1.0);
    if (!p.scale_by_sqrt_s) return scale;
    std::vector<index_t> counts(static_cast<std::size_t>(r), 0);
    for (std::int32_t h : p.hash) ++counts[static_cast<std::size_t>(h)];
    for (std::size_t k = 0; k < scale.size(); ++k)
        if (counts[k] > 0)
            scale[k] = 1.0 / std::sqrt(static_cast<double>(counts[k]));
    return scale;
}

MatrixVariant apply_countsketch(const SketchModel& model, const SparseMatrix& x,
                                ApplyStats* stats) {
    const auto& p = std::get<CountSketchPayload>(model.payload);
    const std::vector<double> out_scale = countsketch_output_scale(p, model.r);
    const CsrView rows = make_row_view(x);
    std::vector<double> accum(static_cast<std::size_t>(model.r), 0.0);
    std::vector<index_t> touched;
    std::vector<SparseVector> out_rows(static_cast<std::size_t>(x.rows()));
    std::uint64_t visited = 0;
    for (index_t i = 0; i < rows.rows; ++i) {
        touched.clear();
        auto ids = rows.row_indices(i);
        auto vals = rows.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto j = static_cast<std::size_t>(ids[k]);
            const auto bucket = static_cast<std::size_t>(p.hash[j]);
            if (accum[bucket] == 0.0 &&
                std::find(touched.begin(), touched.end(),
                          static_cast<index_t>(bucket)) == touched.end())
                touched.push_back(static_cast<index_t>(bucket));
            accum[bucket] += p.signs.signs[j] * vals[k];
            ++visited;
        }
        std::sort(touched.begin(), touched.end());
        SparseVector& row = out_rows[static_cast<std::size_t>(i)];
        row.dim = model.r;
        for (index_t b : touched) {
            const auto bu = static_cast<std::size_t>(b);
            const double v = accum[bu] * out_scale[bu];
            if (v != 0.0) {
                row.idx.push_back(b);
                row.val.push_back(v);
            }
            accum[bu] = 0.0;
        }
    }
    if (stats) stats->nonzeros_visited += visited;
    // Assemble row-wise results into the column-compressed carrier.
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < x.rows(); ++i) {
        const SparseVector& row = out_rows[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < row.idx.size(); ++k)
            triplets.push_back({i, row.idx[k], row.val[k]});
    }
    return SparseMatrix::from_triplets(x.rows(), model.r, triplets);
}

MatrixVariant apply_countsketch(const SketchModel& model, const DenseMatrix& x,
                                ApplyStats* stats) {
    const auto& p = std::get<CountSketchPayload>(model.payload);
    const std::vector<double> out_scale = countsketch_output_scale(p, model.r);
    DenseMatrix out(x.rows(), model.r);
    std::uint64_t visited = 0;
    for (index_t i = 0; i < x.rows(); ++i) {
        auto in_row = x.row(i);
        auto out_row = out.row(i);
        for (index_t j = 0; j < x.cols(); ++j) {
            const double v = in_row[static_cast<std::size_t>(j)];
            if (v == 0.0) continue;
            const auto ju = static_cast<std::size_t>(j);
            out_row[static_cast<std::size_t>(p.hash[ju])] += p.signs.signs[ju] * v;
            ++visited;
        }
        for (index_t k = 0; k < model.r; ++k)
            out_row[static_cast<std::size_t>(k)] *=
                out_scale[static_cast<std::size_t>(k)];
    }
    if (stats) stats->nonzeros_visited += visited;
    return out;
}

void srht_transform_row(const SrhtPayload& p, std::span<double> scratch,
                        std::span<double> out_row) {
    fwht(scratch);
    for (std::size_t k = 0; k < p.selected.size(); ++k)
        out_row[k] = p.scale * scratch[static_cast<std::size_t>(p.selected[k])];
}

MatrixVariant apply_srht(const SketchModel& model, const SparseMatrix& x) {
    const auto& p = std::get<SrhtPayload>(model.payload);
    DenseMatrix out(x.rows(), model.r);
    std::vector<double> scratch(static_cast<std::size_t>(p.padded_dim));
    const CsrView rows = make_row_view(x);
    for (index_t i = 0; i < rows.rows; ++i) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        auto ids = rows.row_indices(i);
        auto vals = rows.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            scratch[static_cast<std::size_t>(ids[k])] =
                vals[k] * p.signs.signs[static_cast<std::size_t>(ids[k])];
        srht_transform_row(p, scratch, out.row(i));
    }
    return out;
}

MatrixVariant apply_srht(const SketchModel& model, const DenseMatrix& x) {
    const auto& p = std::get<SrhtPayload>(model.payload);
    DenseMatrix out(x.rows(), model.r);
    std::vector<double> scratch(static_cast<std::size_t>(p.padded_dim));
    for (index_t i = 0; i < x.rows(); ++i) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        auto in_row = x.row(i);
        for (index_t j = 0; j < x.cols(); ++j)
            scratch[static_cast<std::size_t>(j)] =
                in_row[static_cast<std::size_t>(j)] *
                p.signs.signs[static_cast<std::size_t>(j)];
        srht_transform_row(p, scratch, out.row(i));
    }
    return out;
}

} // namespace

MatrixVariant apply(const SketchModel& model, const SparseMatrix& x,
                    ApplyStats* stats) {
    require(x.cols() == model.d, ErrorKind::shape,
            "shape mismatch: x.cols != model.d");
    switch (model.method) {
    case SketchMethod::gaussian:
    case SketchMethod::achlioptas: return apply_dense_r(model, x);
    case SketchMethod::countsketch: return apply_countsketch(model, x, stats);
    case SketchMethod::srht:
    case SketchMethod::srht_topr: return apply_srht(model, x);
    }
    throw Error(ErrorKind::internal, "unknown sketch method");
}

MatrixVariant apply(const SketchModel& model, const DenseMatrix& x,
                    ApplyStats* stats) {
    require(x.cols() == model.d, ErrorKind::shape,
            "shape mismatch: x.cols != model.d");
    switch (model.method) {
    case SketchMethod::gaussian:
    case SketchMethod::achlioptas: return apply_dense_r(model, x);
    case SketchMethod::countsketch: return apply_countsketch(model, x, stats);
    case SketchMethod::srht:
    case SketchMethod::srht_topr: return apply_srht(model, x);
    }
    throw Error(ErrorKind::internal, "unknown sketch method");
}

MatrixVariant apply(const SketchModel& model, const MatrixVariant& x,
                    ApplyStats* stats) {
    return std::visit(
        [&model, stats](const auto& m) { return apply(model, m, stats); }, x);
}

namespace {

nlohmann::json sign_diag_to_json(const SignDiagonal& d) {
    nlohmann::json signs = nlohmann::json::array();
    for (std::int8_t s : d.signs) signs.push_back(static_cast<int>(s));
    return {{"dim", d.dim}, {"signs", signs}};
}

SignDiagonal sign_diag_from_json(const nlohmann::json& j) {
    std::vector<std::int8_t> signs;
    for (const auto& s : j.at("signs"))
        signs.push_back(static_cast<std::int8_t>(s.get<int>()));
    SignDiagonal d = SignDiagonal::checked(std::move(signs));
    require(d.dim == j.at("dim").get<index_t>(), ErrorKind::parse,
            "sign diagonal dim mismatch");
    return d;
}

} // namespace

std::string sketch_model_to_json(const SketchModel& model) {
    nlohmann::json j;
    j["format"] = "sketchbench.model";
    j["version"] = 1;
    j["kind"] = "sketch";
    j["method"] = to_string(model.method);
    j["d"] = model.d;
    j["r"] = model.r;
    j["seed"] = model.seed;
    std::visit(
        [&j](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, DenseMatrix>) {
                j["payload"] = {{"type", "dense"},
                                {"rows", p.rows()},
                                {"cols", p.cols()},
                                {"values", p.values()}};
            } else if constexpr (std::is_same_v<P, CountSketchPayload>) {
                j["payload"] = {{"type", "countsketch"},
                                {"signs", sign_diag_to_json(p.signs)},
                                {"hash", p.hash},
                                {"scale_by_sqrt_s", p.scale_by_sqrt_s}};
            } else {
                j["payload"] = {{"type", "srht"},
                                {"signs", sign_diag_to_json(p.signs)},
                                {"padded_dim", p.padded_dim},
                                {"selected", p.selected},
                                {"scale", p.scale}};
            }
        },
        model.payload);
    return j.dump();
}

SketchModel sketch_model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad model JSON: ") + e.what());
    }
    require(j.value("format", "") == "sketchbench.model" &&
                j.value("kind", "") == "sketch",
            ErrorKind::parse, "not a sketch model blob");
    SketchModel model;
    model.method = sketch_method_from_string(j.at("method").get<std::string>());
    model.d = j.at("d").get<index_t>();
    model.r = j.at("r").get<index_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("payload");
    const std::string type = p.at("type").get<std::string>();
    if (type == "dense") {
        model.payload = DenseMatrix(p.at("rows").get<index_t>(),
                                    p.at("cols").get<index_t>(),
                                    p.at("values").get<std::vector<double>>());
    } else if (type == "countsketch") {
        CountSketchPayload payload;
        payload.signs = sign_diag_from_json(p.at("signs"));
        payload.hash = p.at("hash").get<std::vector<std::int32_t>>();
        payload.scale_by_sqrt_s = p.at("scale_by_sqrt_s").get<bool>();
        model.payload = std::move(payload);
    } else if (type == "srht") {
        SrhtPayload payload;
        payload.signs = sign_diag_from_json(p.at("signs"));
        payload.padded_dim = p.at("padded_dim").get<index_t>();
        payload.selected = p.at("selected").get<std::vector<index_t>>();
        payload.scale = p.at("scale").get<double>();
        model.payload = std::move(payload);
    } else {
        throw Error(ErrorKind::parse, "unknown payload type '" + type + "'");
    }
    return model;
}

} // namespace sketchbench
