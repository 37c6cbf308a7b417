#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "sketchbench/matrix.hpp"

namespace sketchbench {

enum class SketchMethod {
    gaussian,
    achlioptas,
    countsketch,
    srht,
    srht_topr,
};

std::string to_string(SketchMethod m);
SketchMethod sketch_method_from_string(const std::string& name);

// Count-sketch R = D * Phi kept implicit: the sign diagonal plus the bucket
// map h. Phi is never materialized outside tests.
struct CountSketchPayload {
    SignDiagonal signs;
    std::vector<std::int32_t> hash; // h : [0, d) -> [0, r)
    // When set, output column k is scaled by 1/sqrt(|h^-1(k)|).
    bool scale_by_sqrt_s = false;

    bool operator==(const CountSketchPayload&) const = default;
};

// Implicit R = scale * D * H_{d'} * P with H the (unnormalized)
// Walsh-Hadamard matrix on the zero-padded dimension d' and P a selection of
// r output coordinates. scale = 1/sqrt(r) makes E||x R||^2 = ||x||^2 under
// uniform sampling without replacement.
struct SrhtPayload {
    SignDiagonal signs;
    index_t padded_dim = 0;
    std::vector<index_t> selected;
    double scale = 1.0;

    bool operator==(const SrhtPayload&) const = default;
};

struct SketchModel {
    SketchMethod method = SketchMethod::gaussian;
    index_t d = 0;
    index_t r = 0;
    std::uint64_t seed = 0;
    std::variant<DenseMatrix, CountSketchPayload, SrhtPayload> payload;
};

bool payload_equal(const SketchModel& a, const SketchModel& b);

// All fit_* are pure functions of their arguments; the random stream is
// Rng::derive(seed, method name).
SketchModel fit_gaussian(index_t d, index_t r, std::uint64_t seed);
SketchModel fit_achlioptas(index_t d, index_t r, std::uint64_t seed);
SketchModel fit_countsketch(index_t d, index_t r, std::uint64_t seed,
                            bool scale_by_sqrt_s = false);
SketchModel fit_srht(index_t d, index_t r, std::uint64_t seed);
SketchModel fit_srht_topr(index_t d, index_t r, std::uint64_t seed,
                          const SparseMatrix& x_train);

struct ApplyStats {
    std::uint64_t nonzeros_visited = 0;
};

// X~ = X * R. The count-sketch path streams stored nonzeros and keeps sparse
// input sparse; dense methods return a dense matrix.
MatrixVariant apply(const SketchModel& model, const SparseMatrix& x,
                    ApplyStats* stats = nullptr);
MatrixVariant apply(const SketchModel& model, const DenseMatrix& x,
                    ApplyStats* stats = nullptr);
MatrixVariant apply(const SketchModel& model, const MatrixVariant& x,
                    ApplyStats* stats = nullptr);

// In-place unnormalized Walsh-Hadamard transform; length must be a power of
// two.
void fwht(std::span<double> data);

std::string sketch_model_to_json(const SketchModel& model);
SketchModel sketch_model_from_json(const std::string& text);

} // namespace sketchbench
