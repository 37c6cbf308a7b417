#include "sketchbench/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sketchbench {

namespace {

void check_finite(std::span<const double> values) {
    for (double v : values)
        require(std::isfinite(v), ErrorKind::invalid_argument,
                "matrix entries must be finite");
}

void check_shape_positive(index_t rows, index_t cols) {
    require(rows >= 0 && cols >= 0, ErrorKind::shape, "negative dimension");
}

} // namespace

DenseMatrix::DenseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols),
      values_(static_cast<std::size_t>(rows * cols), 0.0) {
    check_shape_positive(rows, cols);
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    check_shape_positive(rows, cols);
    require(values_.size() == static_cast<std::size_t>(rows * cols),
            ErrorKind::shape, "dense value buffer does not match rows x cols");
    check_finite(values_);
}

double SparseVector::l1_norm() const {
    double s = 0.0;
    for (double v : val) s += std::abs(v);
    return s;
}

double SparseVector::sq_norm() const {
    double s = 0.0;
    for (double v : val) s += v * v;
    return s;
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k)
        out[static_cast<std::size_t>(idx[k])] = val[k];
    return out;
}

SparseVector SparseVector::from_dense(std::span<const double> v) {
    SparseVector out;
    out.dim = static_cast<index_t>(v.size());
    for (index_t i = 0; i < out.dim; ++i) {
        const double x = v[static_cast<std::size_t>(i)];
        require(std::isfinite(x), ErrorKind::invalid_argument,
                "vector entries must be finite");
        if (x != 0.0) {
            out.idx.push_back(i);
            out.val.push_back(x);
        }
    }
    return out;
}

SparseVector SparseVector::checked(index_t dim, std::vector<index_t> idx,
                                   std::vector<double> val) {
    require(idx.size() == val.size(), ErrorKind::invalid_argument,
            "index/value length mismatch");
    index_t prev = -1;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        require(idx[k] > prev && idx[k] < dim, ErrorKind::invalid_argument,
                "sparse vector indices must be strictly increasing and in range");
        require(std::isfinite(val[k]) && val[k] != 0.0,
                ErrorKind::invalid_argument,
                "sparse vector values must be finite and nonzero");
        prev = idx[k];
    }
    SparseVector out;
    out.dim = dim;
    out.idx = std::move(idx);
    out.val = std::move(val);
    return out;
}

SparseMatrix::SparseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols),
      col_ptr_(static_cast<std::size_t>(cols) + 1, 0) {
    check_shape_positive(rows, cols);
}

SparseMatrix SparseMatrix::from_triplets(index_t rows, index_t cols,
                                         std::span<const Triplet> triplets) {
    check_shape_positive(rows, cols);
    std::vector<Triplet> sorted(triplets.begin(), triplets.end());
    for (const Triplet& t : sorted) {
        require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
                ErrorKind::invalid_argument, "triplet index out of range");
        require(std::isfinite(t.value), ErrorKind::invalid_argument,
                "triplet values must be finite");
    }
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });

    SparseMatrix out(rows, cols);
    out.row_idx_.reserve(sorted.size());
    out.values_.reserve(sorted.size());
    std::size_t k = 0;
    for (index_t j = 0; j < cols; ++j) {
        while (k < sorted.size() && sorted[k].col == j) {
            const index_t r = sorted[k].row;
            double v = 0.0;
            while (k < sorted.size() && sorted[k].col == j && sorted[k].row == r)
                v += sorted[k++].value;
            if (v != 0.0) {
                out.row_idx_.push_back(r);
                out.values_.push_back(v);
            }
        }
        out.col_ptr_[static_cast<std::size_t>(j) + 1] =
            static_cast<index_t>(out.values_.size());
    }
    return out;
}

SparseMatrix SparseMatrix::from_columns(index_t rows,
                                        std::span<const SparseVector> columns) {
    SparseMatrix out(rows, static_cast<index_t>(columns.size()));
    for (index_t j = 0; j < out.cols_; ++j) {
        const SparseVector& c = columns[static_cast<std::size_t>(j)];
        require(c.dim == rows, ErrorKind::shape,
                "column length does not match matrix rows");
        index_t prev = -1;
        for (std::size_t k = 0; k < c.idx.size(); ++k) {
            require(c.idx[k] > prev && c.idx[k] < rows,
                    ErrorKind::invalid_argument, "bad column index order");
            require(std::isfinite(c.val[k]), ErrorKind::invalid_argument,
                    "column values must be finite");
            prev = c.idx[k];
            if (c.val[k] != 0.0) {
                out.row_idx_.push_back(c.idx[k]);
                out.values_.push_back(c.val[k]);
            }
        }
        out.col_ptr_[static_cast<std::size_t>(j) + 1] =
            static_cast<index_t>(out.values_.size());
    }
    return out;
}

SparseVector SparseMatrix::column(index_t j) const {
    SparseVector out;
    out.dim = rows_;
    auto ids = column_indices(j);
    auto vals = column_values(j);
    out.idx.assign(ids.begin(), ids.end());
    out.val.assign(vals.begin(), vals.end());
    return out;
}

CsrView make_row_view(const SparseMatrix& m) {
    CsrView view;
    view.rows = m.rows();
    view.cols = m.cols();
    view.row_ptr.assign(static_cast<std::size_t>(m.rows()) + 1, 0);
    for (index_t j = 0; j < m.cols(); ++j)
        for (index_t i : m.column_indices(j))
            ++view.row_ptr[static_cast<std::size_t>(i) + 1];
    std::partial_sum(view.row_ptr.begin(), view.row_ptr.end(),
                     view.row_ptr.begin());
    view.col_idx.resize(static_cast<std::size_t>(m.nnz()));
    view.values.resize(static_cast<std::size_t>(m.nnz()));
    std::vector<index_t> cursor(view.row_ptr.begin(), view.row_ptr.end() - 1);
    for (index_t j = 0; j < m.cols(); ++j) {
        auto ids = m.column_indices(j);
        auto vals = m.column_values(j);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto slot =
                static_cast<std::size_t>(cursor[static_cast<std::size_t>(ids[k])]++);
            view.col_idx[slot] = j;
            view.values[slot] = vals[k];
        }
    }
    return view;
}

SignDiagonal SignDiagonal::checked(std::vector<std::int8_t> signs) {
    for (std::int8_t s : signs)
        require(s == 1 || s == -1, ErrorKind::invalid_argument,
                "sign diagonal entries must be +1 or -1");
    SignDiagonal d;
    d.dim = static_cast<index_t>(signs.size());
    d.signs = std::move(signs);
    return d;
}

index_t nnz(const DenseMatrix& m) {
    index_t count = 0;
    for (double v : m.values())
        if (v != 0.0) ++count;
    return count;
}

index_t nnz(const SparseMatrix& m) { return m.nnz(); }

index_t nnz(const MatrixVariant& m) {
    return std::visit([](const auto& mm) { return nnz(mm); }, m);
}

namespace {

double sparsity_rate_impl(index_t nonzeros, index_t rows, index_t cols) {
    require(rows * cols > 0, ErrorKind::shape, "degenerate shape");
    return 1.0 - static_cast<double>(nonzeros) /
                     (static_cast<double>(rows) * static_cast<double>(cols));
}

} // namespace

double sparsity_rate(const DenseMatrix& m) {
    return sparsity_rate_impl(nnz(m), m.rows(), m.cols());
}

double sparsity_rate(const SparseMatrix& m) {
    return sparsity_rate_impl(m.nnz(), m.rows(), m.cols());
}

double sparsity_rate(const MatrixVariant& m) {
    return std::visit([](const auto& mm) { return sparsity_rate(mm); }, m);
}

double frobenius_norm(const DenseMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

double frobenius_norm(const SparseMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

double frobenius_norm(const MatrixVariant& m) {
    return std::visit([](const auto& mm) { return frobenius_norm(mm); }, m);
}

DenseMatrix densify(const SparseMatrix& m) {
    DenseMatrix out(m.rows(), m.cols());
    for (index_t j = 0; j < m.cols(); ++j) {
        auto ids = m.column_indices(j);
        auto vals = m.column_values(j);
        for (std::size_t k = 0; k < ids.size(); ++k) out(ids[k], j) = vals[k];
    }
    return out;
}

SparseMatrix sparsify(const DenseMatrix& m) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) triplets.push_back({i, j, m(i, j)});
    return SparseMatrix::from_triplets(m.rows(), m.cols(), triplets);
}

namespace {

void check_product_shapes(index_t a_cols, index_t b_rows) {
    require(a_cols == b_rows, ErrorKind::shape,
            "shape mismatch: a.cols != b.rows");
}

} // namespace

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    check_product_shapes(a.cols(), b.rows());
    DenseMatrix out(a.rows(), b.cols());
    for (index_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (index_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto b_row = b.row(k);
            for (index_t j = 0; j < b.cols(); ++j)
                out_row[static_cast<std::size_t>(j)] +=
                    aik * b_row[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

DenseMatrix multiply(const SparseMatrix& a, const DenseMatrix& b) {
    check_product_shapes(a.cols(), b.rows());
    DenseMatrix out(a.rows(), b.cols());
    for (index_t k = 0; k < a.cols(); ++k) {
        auto ids = a.column_indices(k);
        auto vals = a.column_values(k);
        auto b_row = b.row(k);
        for (std::size_t t = 0; t < ids.size(); ++t) {
            auto out_row = out.row(ids[t]);
            const double v = vals[t];
            for (index_t j = 0; j < b.cols(); ++j)
                out_row[static_cast<std::size_t>(j)] +=
                    v * b_row[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

DenseMatrix multiply(const DenseMatrix& a, const SparseMatrix& b) {
    check_product_shapes(a.cols(), b.rows());
    DenseMatrix out(a.rows(), b.cols());
    for (index_t j = 0; j < b.cols(); ++j) {
        auto ids = b.column_indices(j);
        auto vals = b.column_values(j);
        for (index_t i = 0; i < a.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t t = 0; t < ids.size(); ++t)
                acc += a(i, ids[t]) * vals[t];
            out(i, j) = acc;
        }
    }
    return out;
}

MatrixVariant multiply(const SparseMatrix& a, const SparseMatrix& b,
                       ProductForm form) {
    check_product_shapes(a.cols(), b.rows());
    // Column-by-column sparse accumulator; exact zeros from cancellation are
    // dropped.
    std::vector<double> accum(static_cast<std::size_t>(a.rows()), 0.0);
    std::vector<index_t> touched;
    std::vector<SparseVector> columns(static_cast<std::size_t>(b.cols()));
    for (index_t j = 0; j < b.cols(); ++j) {
        touched.clear();
        auto b_ids = b.column_indices(j);
        auto b_vals = b.column_values(j);
        for (std::size_t t = 0; t < b_ids.size(); ++t) {
            const index_t k = b_ids[t];
            const double bkj = b_vals[t];
            auto a_ids = a.column_indices(k);
            auto a_vals = a.column_values(k);
            for (std::size_t s = 0; s < a_ids.size(); ++s) {
                const auto i = static_cast<std::size_t>(a_ids[s]);
                if (accum[i] == 0.0 &&
                    std::find(touched.begin(), touched.end(), a_ids[s]) ==
                        touched.end())
                    touched.push_back(a_ids[s]);
                accum[i] += a_vals[s] * bkj;
            }
        }
        std::sort(touched.begin(), touched.end());
        SparseVector& col = columns[static_cast<std::size_t>(j)];
        col.dim = a.rows();
        for (index_t i : touched) {
            const double v = accum[static_cast<std::size_t>(i)];
            if (v != 0.0) {
                col.idx.push_back(i);
                col.val.push_back(v);
            }
            accum[static_cast<std::size_t>(i)] = 0.0;
        }
    }
    SparseMatrix sparse = SparseMatrix::from_columns(a.rows(), columns);
    const double cells =
        static_cast<double>(a.rows()) * static_cast<double>(b.cols());
    const bool dense_result =
        form == ProductForm::dense ||
        (form == ProductForm::automatic && cells > 0 &&
         static_cast<double>(sparse.nnz()) / cells > 0.5);
    if (dense_result) return densify(sparse);
    return sparse;
}

MatrixVariant multiply(const MatrixVariant& a, const MatrixVariant& b,
                       ProductForm form) {
    return std::visit(
        [form](const auto& x, const auto& y) -> MatrixVariant {
            using X = std::decay_t<decltype(x)>;
            using Y = std::decay_t<decltype(y)>;
            if constexpr (std::is_same_v<X, SparseMatrix> &&
                          std::is_same_v<Y, SparseMatrix>)
                return multiply(x, y, form);
            else
                return multiply(x, y);
        },
        a, b);
}

DenseMatrix scale_columns_by_signs(const DenseMatrix& x, const SignDiagonal& d) {
    require(x.cols() == d.dim, ErrorKind::shape,
            "shape mismatch: x.cols != diagonal dim");
    DenseMatrix out = x;
    for (index_t i = 0; i < x.rows(); ++i) {
        auto row = out.row(i);
        for (index_t j = 0; j < x.cols(); ++j)
            row[static_cast<std::size_t>(j)] *= d.signs[static_cast<std::size_t>(j)];
    }
    return out;
}

SparseMatrix scale_columns_by_signs(const SparseMatrix& x, const SignDiagonal& d) {
    require(x.cols() == d.dim, ErrorKind::shape,
            "shape mismatch: x.cols != diagonal dim");
    std::vector<SparseVector> columns(static_cast<std::size_t>(x.cols()));
    for (index_t j = 0; j < x.cols(); ++j) {
        SparseVector& col = columns[static_cast<std::size_t>(j)];
        col.dim = x.rows();
        auto ids = x.column_indices(j);
        auto vals = x.column_values(j);
        col.idx.assign(ids.begin(), ids.end());
        col.val.resize(vals.size());
        const double s = d.signs[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < vals.size(); ++k) col.val[k] = s * vals[k];
    }
    return SparseMatrix::from_columns(x.rows(), columns);
}

double column_sq_distance(const SparseMatrix& m, index_t col,
                          const SparseVector& c) {
    require(col >= 0 && col < m.cols(), ErrorKind::invalid_argument,
            "column index out of range");
    require(c.dim == m.rows(), ErrorKind::shape,
            "vector length does not match matrix rows");
    auto a_ids = m.column_indices(col);
    auto a_vals = m.column_values(col);
    double dist = 0.0;
    std::size_t i = 0, k = 0;
    while (i < a_ids.size() && k < c.idx.size()) {
        if (a_ids[i] == c.idx[k]) {
            const double diff = a_vals[i] - c.val[k];
            dist += diff * diff;
            ++i;
            ++k;
        } else if (a_ids[i] < c.idx[k]) {
            dist += a_vals[i] * a_vals[i];
            ++i;
        } else {
            dist += c.val[k] * c.val[k];
            ++k;
        }
    }
    for (; i < a_ids.size(); ++i) dist += a_vals[i] * a_vals[i];
    for (; k < c.idx.size(); ++k) dist += c.val[k] * c.val[k];
    return dist;
}

double column_sq_distance(const SparseMatrix& m, index_t col,
                          std::span<const double> c) {
    require(col >= 0 && col < m.cols(), ErrorKind::invalid_argument,
            "column index out of range");
    require(static_cast<index_t>(c.size()) == m.rows(), ErrorKind::shape,
            "vector length does not match matrix rows");
    auto ids = m.column_indices(col);
    auto vals = m.column_values(col);
    double dist = 0.0;
    std::size_t k = 0;
    for (index_t i = 0; i < m.rows(); ++i) {
        double mi = 0.0;
        if (k < ids.size() && ids[k] == i) mi = vals[k++];
        const double diff = mi - c[static_cast<std::size_t>(i)];
        dist += diff * diff;
    }
    return dist;
}

} // namespace sketchbench
