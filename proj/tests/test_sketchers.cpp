#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sketchbench/sketchers.hpp"
#include "test_helpers.hpp"

using namespace sketchbench;
using testutil::random_dense;
using testutil::random_sparse;
using testutil::random_vector;

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

DenseMatrix materialize_countsketch(const SketchModel& model) {
    const auto& p = std::get<CountSketchPayload>(model.payload);
    DenseMatrix r_matrix(model.d, model.r);
    for (index_t i = 0; i < model.d; ++i)
        r_matrix(i, p.hash[static_cast<std::size_t>(i)]) =
            p.signs.signs[static_cast<std::size_t>(i)];
    return r_matrix;
}

double row_sq_norm(const DenseMatrix& m, index_t i) {
    double s = 0.0;
    for (double v : m.row(i)) s += v * v;
    return s;
}

} // namespace

TEST_CASE("gaussian sketch statistics") {
    const index_t d = 1000, r = 50;
    const SketchModel model = fit_gaussian(d, r, 5);
    const auto& values = std::get<DenseMatrix>(model.payload).values();

    const double mean = mean_of(values);
    const double stderr_of_mean =
        std::sqrt(1.0 / static_cast<double>(d)) /
        std::sqrt(static_cast<double>(values.size()));
    CHECK(std::abs(mean) < 4.0 * stderr_of_mean);

    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    CHECK(var == doctest::Approx(1.0 / static_cast<double>(d)).epsilon(0.10));

    CHECK(payload_equal(model, fit_gaussian(d, r, 5)));
    CHECK_FALSE(payload_equal(model, fit_gaussian(d, r, 6)));
}

TEST_CASE("achlioptas sketch statistics") {
    const index_t d = 500, r = 200; // d*r = 1e5
    const SketchModel model = fit_achlioptas(d, r, 9);
    const auto& values = std::get<DenseMatrix>(model.payload).values();

    std::size_t zeros = 0;
    for (double v : values)
        if (v == 0.0) ++zeros;
    const double zero_fraction =
        static_cast<double>(zeros) / static_cast<double>(values.size());
    CHECK(zero_fraction == doctest::Approx(2.0 / 3.0).epsilon(0.02));

    double var = 0.0;
    for (double v : values) var += v * v; // mean is 0 by symmetry
    var /= static_cast<double>(values.size());
    CHECK(var == doctest::Approx(1.0 / static_cast<double>(d)).epsilon(0.10));

    const double scale = std::sqrt(3.0 / static_cast<double>(d));
    for (double v : values)
        CHECK((v == 0.0 || v == scale || v == -scale));

    CHECK(payload_equal(model, fit_achlioptas(d, r, 9)));
}

TEST_CASE("countsketch construction") {
    const index_t d = 64, r = 8;
    const SketchModel model = fit_countsketch(d, r, 13);
    const auto& p = std::get<CountSketchPayload>(model.payload);

    // Implied Phi has exactly one 1 per row; its column sums add up to d.
    CHECK(p.hash.size() == static_cast<std::size_t>(d));
    std::vector<index_t> column_sums(static_cast<std::size_t>(r), 0);
    for (std::int32_t h : p.hash) {
        CHECK(h >= 0);
        CHECK(h < r);
        ++column_sums[static_cast<std::size_t>(h)];
    }
    CHECK(std::accumulate(column_sums.begin(), column_sums.end(), index_t{0}) ==
          d);
    for (std::int8_t s : p.signs.signs) CHECK((s == 1 || s == -1));

    SUBCASE("hash uniformity, chi-squared at alpha = 0.01") {
        const index_t big_d = 100000, small_r = 10;
        const SketchModel big = fit_countsketch(big_d, small_r, 17);
        const auto& ph = std::get<CountSketchPayload>(big.payload);
        std::vector<double> counts(static_cast<std::size_t>(small_r), 0.0);
        for (std::int32_t h : ph.hash) counts[static_cast<std::size_t>(h)] += 1.0;
        const double expected =
            static_cast<double>(big_d) / static_cast<double>(small_r);
        double chi2 = 0.0;
        for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
        // 9 degrees of freedom, upper 1% point.
        CHECK(chi2 < 21.666);
    }
}

TEST_CASE("countsketch apply streams nonzeros") {
    Rng rng(19);
    const index_t d = 40, r = 7;
    const SketchModel model = fit_countsketch(d, r, 21);

    SUBCASE("zero matrix maps to zero") {
        const MatrixVariant out = apply(model, SparseMatrix(6, d));
        CHECK(nnz(out) == 0);
    }

    SUBCASE("matches the materialized X * (D Phi) product") {
        const DenseMatrix r_matrix = materialize_countsketch(model);
        for (int trial = 0; trial < 20; ++trial) {
            const DenseMatrix x = random_dense(rng, 9, d);
            const DenseMatrix streamed =
                std::get<DenseMatrix>(apply(model, x));
            const DenseMatrix oracle = multiply(x, r_matrix);
            for (index_t i = 0; i < x.rows(); ++i)
                for (index_t j = 0; j < r; ++j)
                    CHECK(streamed(i, j) ==
                          doctest::Approx(oracle(i, j)).epsilon(1e-12));
        }
    }

    SUBCASE("sparse path: nnz bound, visit counter, sparse output") {
        for (int trial = 0; trial < 10; ++trial) {
            const SparseMatrix x = random_sparse(rng, 12, d, 0.3);
            ApplyStats stats;
            const MatrixVariant out = apply(model, x, &stats);
            CHECK(std::holds_alternative<SparseMatrix>(out));
            CHECK(nnz(out) <= x.nnz());
            CHECK(stats.nonzeros_visited == static_cast<std::uint64_t>(x.nnz()));

            const DenseMatrix oracle = multiply(densify(x),
                                                materialize_countsketch(model));
            const DenseMatrix dense_out = densify(std::get<SparseMatrix>(out));
            for (index_t i = 0; i < x.rows(); ++i)
                for (index_t j = 0; j < r; ++j)
                    CHECK(dense_out(i, j) ==
                          doctest::Approx(oracle(i, j)).epsilon(1e-12));
        }
    }

    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS((void)apply(model, SparseMatrix(3, d + 1)), Error);
    }
}

TEST_CASE("countsketch unbiasedness: E[X~ X~^T] = X X^T") {
    Rng rng(23);
    const index_t n = 5, d = 20, r = 8;
    const DenseMatrix x = random_dense(rng, n, d);

    std::vector<double> sum_outer(static_cast<std::size_t>(n * n), 0.0);
    const int seeds = 2000;
    for (int seed = 0; seed < seeds; ++seed) {
        const DenseMatrix sketched = std::get<DenseMatrix>(
            apply(fit_countsketch(d, r, static_cast<std::uint64_t>(seed)), x));
        for (index_t a = 0; a < n; ++a)
            for (index_t b = 0; b < n; ++b) {
                double dot = 0.0;
                for (index_t k = 0; k < r; ++k) dot += sketched(a, k) * sketched(b, k);
                sum_outer[static_cast<std::size_t>(a * n + b)] += dot;
            }
    }

    double err = 0.0, norm = 0.0;
    for (index_t a = 0; a < n; ++a)
        for (index_t b = 0; b < n; ++b) {
            double exact = 0.0;
            for (index_t j = 0; j < d; ++j) exact += x(a, j) * x(b, j);
            const double estimate =
                sum_outer[static_cast<std::size_t>(a * n + b)] / seeds;
            err += (estimate - exact) * (estimate - exact);
            norm += exact * exact;
        }
    CHECK(std::sqrt(err) <= 0.10 * std::sqrt(norm));
}

TEST_CASE("srht") {
    SUBCASE("full transform with identity selection is an isometry") {
        // d = r = d' exercises the payload directly; fit_* requires r < d.
        const index_t d = 8;
        Rng rng(29);
        SrhtPayload payload;
        payload.signs = testutil::random_signs(rng, d);
        payload.padded_dim = d;
        payload.selected.resize(static_cast<std::size_t>(d));
        std::iota(payload.selected.begin(), payload.selected.end(), index_t{0});
        payload.scale = 1.0 / std::sqrt(static_cast<double>(d));
        const SketchModel model{SketchMethod::srht, d, d, 0, payload};

        const DenseMatrix x = random_dense(rng, 5, d);
        const DenseMatrix out = std::get<DenseMatrix>(apply(model, x));
        for (index_t i = 0; i < 5; ++i)
            CHECK(row_sq_norm(out, i) ==
                  doctest::Approx(row_sq_norm(x, i)).epsilon(1e-10));
    }

    SUBCASE("expected squared norm ratio is 1 over seeds") {
        const index_t d = 50, r = 13;
        Rng rng(31);
        const std::vector<double> x = random_vector(rng, d);
        DenseMatrix x_mat(1, d, std::vector<double>(x));
        double x_sq = 0.0;
        for (double v : x) x_sq += v * v;

        double ratio_sum = 0.0;
        const int seeds = 200;
        for (int seed = 0; seed < seeds; ++seed) {
            const SketchModel model =
                fit_srht(d, r, static_cast<std::uint64_t>(seed));
            const DenseMatrix out = std::get<DenseMatrix>(apply(model, x_mat));
            ratio_sum += row_sq_norm(out, 0) / x_sq;
        }
        CHECK(ratio_sum / seeds == doctest::Approx(1.0).epsilon(0.05));
    }

    SUBCASE("same seed gives identical selection and signs") {
        CHECK(payload_equal(fit_srht(100, 9, 3), fit_srht(100, 9, 3)));
    }

    SUBCASE("padding to the next power of two") {
        const SketchModel model = fit_srht(100, 9, 3);
        CHECK(std::get<SrhtPayload>(model.payload).padded_dim == 128);
    }
}

TEST_CASE("srht_topr selects the top-energy coordinates") {
    const index_t d = 8, r = 1;
    const std::uint64_t seed = 37;

    // The sign draw does not depend on the training data, so fit once to
    // learn D, then build training rows proportional to D * H e_t: all the
    // transformed energy lands on coordinate t.
    Rng rng(41);
    const SketchModel probe =
        fit_srht_topr(d, r, seed, random_sparse(rng, 4, d, 0.8));
    const auto& signs = std::get<SrhtPayload>(probe.payload).signs;

    const index_t target = 3;
    std::vector<double> h_col(static_cast<std::size_t>(d), 0.0);
    h_col[static_cast<std::size_t>(target)] = 1.0;
    fwht(h_col); // column `target` of the Hadamard matrix

    std::vector<Triplet> triplets;
    for (index_t row = 0; row < 3; ++row)
        for (index_t j = 0; j < d; ++j)
            triplets.push_back(
                {row, j,
                 static_cast<double>(row + 1) *
                     signs.signs[static_cast<std::size_t>(j)] *
                     h_col[static_cast<std::size_t>(j)]});
    const SparseMatrix x_train = SparseMatrix::from_triplets(3, d, triplets);

    const SketchModel model = fit_srht_topr(d, r, seed, x_train);
    const auto& payload = std::get<SrhtPayload>(model.payload);
    CHECK(payload.selected == std::vector<index_t>{target});

    SUBCASE("selection is a function of (x_train, seed)") {
        CHECK(payload_equal(model, fit_srht_topr(d, r, seed, x_train)));
    }

    SUBCASE("top-r energy dominates a uniform selection in expectation") {
        Rng data_rng(43);
        const SparseMatrix x = random_sparse(data_rng, 20, 30, 0.4);
        double top_total = 0.0, uniform_total = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const SketchModel topr = fit_srht_topr(30, 5, s, x);
            const SketchModel uniform = fit_srht(30, 5, s);
            const DenseMatrix top_out =
                std::get<DenseMatrix>(apply(topr, x));
            const DenseMatrix uni_out =
                std::get<DenseMatrix>(apply(uniform, x));
            for (index_t i = 0; i < top_out.rows(); ++i) {
                top_total += row_sq_norm(top_out, i);
                uniform_total += row_sq_norm(uni_out, i);
            }
        }
        CHECK(top_total >= uniform_total);
    }
}

TEST_CASE("gaussian JL property, reduced-seed check") {
    const index_t n = 40, d = 400;
    const double eps = 0.5;
    const auto r = static_cast<index_t>(
        8 * std::ceil(std::log(static_cast<double>(n)) / (eps * eps)));
    Rng rng(47);
    const DenseMatrix x = random_dense(rng, n, d);
    // Entries have variance 1/d, so E||x R||^2 = (r/d) ||x||^2; the sandwich
    // is checked on distances rescaled by sqrt(d/r).
    const double correction = std::sqrt(static_cast<double>(d) / r);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DenseMatrix sketched =
            std::get<DenseMatrix>(apply(fit_gaussian(d, r, seed), x));
        int ok = 0, total = 0;
        for (index_t i = 0; i < n; ++i)
            for (index_t j = i + 1; j < n; ++j) {
                double orig = 0.0, proj = 0.0;
                for (index_t k = 0; k < d; ++k) {
                    const double diff = x(i, k) - x(j, k);
                    orig += diff * diff;
                }
                for (index_t k = 0; k < r; ++k) {
                    const double diff = sketched(i, k) - sketched(j, k);
                    proj += diff * diff;
                }
                orig = std::sqrt(orig);
                proj = correction * std::sqrt(proj);
                if (proj >= (1.0 - eps) * orig && proj <= (1.0 + eps) * orig)
                    ++ok;
                ++total;
            }
        CHECK(static_cast<double>(ok) >= 0.9 * total);
    }
}

TEST_CASE("fit_* reject r >= d") {
    CHECK_THROWS_AS((void)fit_gaussian(5, 5, 0), Error);
    CHECK_THROWS_AS((void)fit_achlioptas(5, 6, 0), Error);
    CHECK_THROWS_AS((void)fit_countsketch(5, 5, 0), Error);
    CHECK_THROWS_AS((void)fit_srht(5, 7, 0), Error);
    Rng rng(1);
    const SparseMatrix x = random_sparse(rng, 3, 5, 0.5);
    CHECK_THROWS_AS((void)fit_srht_topr(5, 5, 0, x), Error);
}

TEST_CASE("model blob round trip") {
    Rng rng(53);
    const SparseMatrix x = random_sparse(rng, 10, 24, 0.4);
    const std::vector<SketchModel> models = {
        fit_gaussian(24, 6, 11), fit_achlioptas(24, 6, 11),
        fit_countsketch(24, 6, 11), fit_srht(24, 6, 11),
        fit_srht_topr(24, 6, 11, x)};
    for (const SketchModel& model : models) {
        const SketchModel back = sketch_model_from_json(sketch_model_to_json(model));
        CHECK(payload_equal(model, back));
        CHECK(back.seed == model.seed);
    }
    CHECK_THROWS_AS((void)sketch_model_from_json("{"), Error);
    CHECK_THROWS_AS((void)sketch_model_from_json("{\"format\":\"x\"}"), Error);
}

TEST_CASE("countsketch optional sqrt(S) output scaling") {
    Rng rng(59);
    const index_t d = 30, r = 5;
    const SketchModel raw = fit_countsketch(d, r, 61, false);
    const SketchModel scaled = fit_countsketch(d, r, 61, true);
    const auto& p = std::get<CountSketchPayload>(raw.payload);
    std::vector<index_t> counts(static_cast<std::size_t>(r), 0);
    for (std::int32_t h : p.hash) ++counts[static_cast<std::size_t>(h)];

    const DenseMatrix x = random_dense(rng, 4, d);
    const DenseMatrix raw_out = std::get<DenseMatrix>(apply(raw, x));
    const DenseMatrix scaled_out = std::get<DenseMatrix>(apply(scaled, x));
    for (index_t i = 0; i < 4; ++i)
        for (index_t k = 0; k < r; ++k) {
            const double expect =
                counts[static_cast<std::size_t>(k)] > 0
                    ? raw_out(i, k) /
                          std::sqrt(static_cast<double>(
                              counts[static_cast<std::size_t>(k)]))
                    : 0.0;
            CHECK(scaled_out(i, k) == doctest::Approx(expect).epsilon(1e-12));
        }
}
