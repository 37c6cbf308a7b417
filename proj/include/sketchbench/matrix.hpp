#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sketchbench/error.hpp"

namespace sketchbench {

using index_t = std::int64_t;

// Dense real matrix, row-major. Constructors reject non-finite entries.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols);
    DenseMatrix(index_t rows, index_t cols, std::vector<double> values);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    double operator()(index_t i, index_t j) const {
        return values_[static_cast<std::size_t>(i * cols_ + j)];
    }
    double& operator()(index_t i, index_t j) {
        return values_[static_cast<std::size_t>(i * cols_ + j)];
    }

    std::span<const double> row(index_t i) const {
        return {values_.data() + i * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<double> row(index_t i) {
        return {values_.data() + i * cols_, static_cast<std::size_t>(cols_)};
    }

    const std::vector<double>& values() const { return values_; }

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> values_;
};

// Sparse real vector: strictly increasing indices, no stored zeros, finite
// values. Used for matrix columns and for cluster centers.
struct SparseVector {
    index_t dim = 0;
    std::vector<index_t> idx;
    std::vector<double> val;

    index_t nnz() const { return static_cast<index_t>(idx.size()); }
    double l1_norm() const;
    double sq_norm() const;
    std::vector<double> to_dense() const;

    static SparseVector from_dense(std::span<const double> v);
    // Validates the invariants above; throws on violation.
    static SparseVector checked(index_t dim, std::vector<index_t> idx,
                                std::vector<double> val);

    bool operator==(const SparseVector&) const = default;
};

struct Triplet {
    index_t row;
    index_t col;
    double value;
};

// Column-compressed sparse matrix. Within each column row indices are
// strictly increasing and no explicit zero is stored, so nnz() is exact.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(index_t rows, index_t cols);

    // Duplicate (row, col) pairs are summed; entries that sum to exactly
    // zero are dropped.
    static SparseMatrix from_triplets(index_t rows, index_t cols,
                                      std::span<const Triplet> triplets);
    static SparseMatrix from_columns(index_t rows,
                                     std::span<const SparseVector> columns);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    index_t column_nnz(index_t j) const { return col_ptr_[j + 1] - col_ptr_[j]; }
    std::span<const index_t> column_indices(index_t j) const {
        return {row_idx_.data() + col_ptr_[j],
                static_cast<std::size_t>(column_nnz(j))};
    }
    std::span<const double> column_values(index_t j) const {
        return {values_.data() + col_ptr_[j],
                static_cast<std::size_t>(column_nnz(j))};
    }
    SparseVector column(index_t j) const;

    const std::vector<index_t>& col_ptr() const { return col_ptr_; }
    const std::vector<index_t>& row_indices() const { return row_idx_; }
    const std::vector<double>& values() const { return values_; }

    bool operator==(const SparseMatrix&) const = default;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<index_t> col_ptr_{0};
    std::vector<index_t> row_idx_;
    std::vector<double> values_;

    friend class SparseBuilder;
};

// Row-compressed view of a SparseMatrix, built once where row access is the
// hot pattern (classification).
struct CsrView {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> row_ptr;
    std::vector<index_t> col_idx;
    std::vector<double> values;

    index_t row_nnz(index_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
    std::span<const index_t> row_indices(index_t i) const {
        return {col_idx.data() + row_ptr[i], static_cast<std::size_t>(row_nnz(i))};
    }
    std::span<const double> row_values(index_t i) const {
        return {values.data() + row_ptr[i], static_cast<std::size_t>(row_nnz(i))};
    }
};

CsrView make_row_view(const SparseMatrix& m);

// Random sign diagonal; every entry is +1 or -1.
struct SignDiagonal {
    index_t dim = 0;
    std::vector<std::int8_t> signs;

    static SignDiagonal checked(std::vector<std::int8_t> signs);
    bool operator==(const SignDiagonal&) const = default;
};

using MatrixVariant = std::variant<DenseMatrix, SparseMatrix>;

index_t nnz(const DenseMatrix& m);
index_t nnz(const SparseMatrix& m);
index_t nnz(const MatrixVariant& m);

double sparsity_rate(const DenseMatrix& m);
double sparsity_rate(const SparseMatrix& m);
double sparsity_rate(const MatrixVariant& m);

double frobenius_norm(const DenseMatrix& m);
double frobenius_norm(const SparseMatrix& m);
double frobenius_norm(const MatrixVariant& m);

DenseMatrix densify(const SparseMatrix& m);
SparseMatrix sparsify(const DenseMatrix& m);

// Requested output representation for products whose natural density is
// ambiguous (sparse x sparse). `automatic` densifies when the result has
// density above 0.5.
enum class ProductForm { automatic, dense, sparse };

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix multiply(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix multiply(const DenseMatrix& a, const SparseMatrix& b);
MatrixVariant multiply(const SparseMatrix& a, const SparseMatrix& b,
                       ProductForm form = ProductForm::automatic);
MatrixVariant multiply(const MatrixVariant& a, const MatrixVariant& b,
                       ProductForm form = ProductForm::automatic);

DenseMatrix scale_columns_by_signs(const DenseMatrix& x, const SignDiagonal& d);
SparseMatrix scale_columns_by_signs(const SparseMatrix& x, const SignDiagonal& d);

// Squared Euclidean distance between column `col` of m and the vector c.
// The sparse overload walks the union of the two supports.
double column_sq_distance(const SparseMatrix& m, index_t col,
                          const SparseVector& c);
double column_sq_distance(const SparseMatrix& m, index_t col,
                          std::span<const double> c);

} // namespace sketchbench
