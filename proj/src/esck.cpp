#include "sketchbench/esck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "sketchbench/rng.hpp"

namespace sketchbench {

ScalingDiagonal scaling_from_phi(const Indicator& phi) {
    require(phi.cluster_count > 0, ErrorKind::invalid_argument,
            "indicator has no clusters");
    std::vector<index_t> counts(static_cast<std::size_t>(phi.cluster_count), 0);
    for (std::int32_t c : phi.cluster_of) {
        require(c >= 0 && c < phi.cluster_count, ErrorKind::invalid_argument,
                "cluster index out of range");
        ++counts[static_cast<std::size_t>(c)];
    }
    ScalingDiagonal s;
    s.dim = phi.cluster_count;
    s.values.resize(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j)
        s.values[j] = counts[j] > 0 ? 1.0 / static_cast<double>(counts[j]) : 0.0;
    return s;
}

double kmeans_objective(const SparseMatrix& m, const ClusterState& state) {
    require(state.phi.cluster_of.size() == static_cast<std::size_t>(m.cols()),
            ErrorKind::shape, "indicator length does not match columns");
    double total = 0.0;
    for (index_t i = 0; i < m.cols(); ++i) {
        const auto cl = static_cast<std::size_t>(
            state.phi.cluster_of[static_cast<std::size_t>(i)]);
        require(cl < state.centers.size(), ErrorKind::invalid_argument,
                "cluster index out of range");
        total += column_sq_distance(m, i, state.centers[cl]);
    }
    return total;
}

double reconstruction_error(const SparseMatrix& x, const SignDiagonal& d_signs,
                            const Indicator& phi) {
    require(x.cols() == d_signs.dim, ErrorKind::shape,
            "sign diagonal does not match columns");
    require(phi.cluster_of.size() == static_cast<std::size_t>(x.cols()),
            ErrorKind::shape, "indicator length does not match columns");
    const SparseMatrix m = scale_columns_by_signs(x, d_signs);
    const auto n = static_cast<std::size_t>(x.rows());
    const auto r = static_cast<std::size_t>(phi.cluster_count);

    std::vector<std::vector<double>> means(r, std::vector<double>(n, 0.0));
    std::vector<index_t> counts(r, 0);
    for (index_t i = 0; i < m.cols(); ++i) {
        const auto cl = static_cast<std::size_t>(
            phi.cluster_of[static_cast<std::size_t>(i)]);
        auto ids = m.column_indices(i);
        auto vals = m.column_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            means[cl][static_cast<std::size_t>(ids[k])] += vals[k];
        ++counts[cl];
    }
    for (std::size_t j = 0; j < r; ++j)
        if (counts[j] > 0)
            for (double& v : means[j]) v /= static_cast<double>(counts[j]);

    // Residual column i is X(:,i) - sign_i * mean_{a(i)}.
    double total = 0.0;
    for (index_t i = 0; i < x.cols(); ++i) {
        const auto cl = static_cast<std::size_t>(
            phi.cluster_of[static_cast<std::size_t>(i)]);
        const double sign = d_signs.signs[static_cast<std::size_t>(i)];
        const std::vector<double>& mean = means[cl];
        auto ids = x.column_indices(i);
        auto vals = x.column_values(i);
        std::size_t k = 0;
        for (index_t row = 0; row < x.rows(); ++row) {
            double xv = 0.0;
            if (k < ids.size() && ids[k] == row) xv = vals[k++];
            const double diff = xv - sign * mean[static_cast<std::size_t>(row)];
            total += diff * diff;
        }
    }
    return total;
}

namespace {

// Dense mirror of the centers used by the hot assignment/update loops; the
// column-sparse inputs drive the cost, so per (column, center) work is
// O(nnz(column)).
struct CenterCache {
    index_t n = 0;
    std::vector<std::vector<double>> dense;
    std::vector<double> sq_norm;

    static CenterCache build(index_t n,
                             const std::vector<SparseVector>& centers) {
        CenterCache cache;
        cache.n = n;
        cache.dense.resize(centers.size());
        cache.sq_norm.resize(centers.size());
        for (std::size_t j = 0; j < centers.size(); ++j) {
            require(centers[j].dim == n, ErrorKind::shape,
                    "center length does not match matrix rows");
            cache.dense[j] = centers[j].to_dense();
            cache.sq_norm[j] = centers[j].sq_norm();
        }
        return cache;
    }

    void set(std::size_t j, std::vector<double> values) {
        sq_norm[j] = 0.0;
        for (double v : values) sq_norm[j] += v * v;
        dense[j] = std::move(values);
    }
};

double column_sq_norm(const SparseMatrix& m, index_t col) {
    double s = 0.0;
    for (double v : m.column_values(col)) s += v * v;
    return s;
}

std::pair<std::int32_t, double> nearest_center(const SparseMatrix& m,
                                               index_t col, double col_sq,
                                               const CenterCache& cache) {
    auto ids = m.column_indices(col);
    auto vals = m.column_values(col);
    std::int32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cache.dense.size(); ++j) {
        const std::vector<double>& c = cache.dense[j];
        double dot = 0.0;
        for (std::size_t k = 0; k < ids.size(); ++k)
            dot += vals[k] * c[static_cast<std::size_t>(ids[k])];
        const double dist = col_sq + cache.sq_norm[j] - 2.0 * dot;
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<std::int32_t>(j);
        }
    }
    return {best, std::max(0.0, best_dist)};
}

SignDiagonal draw_sign_diagonal(Rng& rng, index_t dim) {
    SignDiagonal d;
    d.dim = dim;
    d.signs.resize(static_cast<std::size_t>(dim));
    for (auto& s : d.signs) s = static_cast<std::int8_t>(rng.next_sign());
    return d;
}

} // namespace

Indicator assign_columns(const SparseMatrix& m,
                         const std::vector<SparseVector>& centers) {
    require(!centers.empty(), ErrorKind::invalid_argument,
            "centers must be nonempty");
    const CenterCache cache = CenterCache::build(m.rows(), centers);
    Indicator phi;
    phi.cluster_count = static_cast<index_t>(centers.size());
    phi.cluster_of.resize(static_cast<std::size_t>(m.cols()));
    for (index_t i = 0; i < m.cols(); ++i)
        phi.cluster_of[static_cast<std::size_t>(i)] =
            nearest_center(m, i, column_sq_norm(m, i), cache).first;
    return phi;
}

std::vector<double> gradient_wrt_center(const SparseMatrix& m,
                                        const Indicator& phi,
                                        const std::vector<SparseVector>& centers,
                                        index_t j) {
    require(j >= 0 && j < static_cast<index_t>(centers.size()),
            ErrorKind::invalid_argument, "center index out of range");
    require(phi.cluster_of.size() == static_cast<std::size_t>(m.cols()),
            ErrorKind::shape, "indicator length does not match columns");
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<double> sum(n, 0.0);
    index_t count = 0;
    for (index_t i = 0; i < m.cols(); ++i) {
        if (phi.cluster_of[static_cast<std::size_t>(i)] != j) continue;
        auto ids = m.column_indices(i);
        auto vals = m.column_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            sum[static_cast<std::size_t>(ids[k])] += vals[k];
        ++count;
    }
    std::vector<double> grad(n, 0.0);
    if (count == 0) return grad;
    const std::vector<double> c = centers[static_cast<std::size_t>(j)].to_dense();
    for (std::size_t t = 0; t < n; ++t)
        grad[t] = -2.0 * (sum[t] - static_cast<double>(count) * c[t]);
    return grad;
}

ClusterState gd_step(const ClusterState& state, const SparseMatrix& m,
                     std::optional<double> eta) {
    if (eta)
        require(*eta >= 0.0, ErrorKind::invalid_argument,
                "learning rate must be non-negative");
    const auto n = static_cast<std::size_t>(m.rows());
    const std::size_t r = state.centers.size();

    std::vector<std::vector<double>> sums(r, std::vector<double>(n, 0.0));
    std::vector<index_t> counts(r, 0);
    for (index_t i = 0; i < m.cols(); ++i) {
        const auto cl = static_cast<std::size_t>(
            state.phi.cluster_of[static_cast<std::size_t>(i)]);
        auto ids = m.column_indices(i);
        auto vals = m.column_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            sums[cl][static_cast<std::size_t>(ids[k])] += vals[k];
        ++counts[cl];
    }

    ClusterState out;
    out.phi = state.phi;
    out.centers.resize(r);
    for (std::size_t j = 0; j < r; ++j) {
        if (!eta) {
            // Lloyd rate: the update lands on the cluster mean.
            if (counts[j] == 0) {
                out.centers[j] = state.centers[j];
                continue;
            }
            std::vector<double> mean = sums[j];
            for (double& v : mean) v /= static_cast<double>(counts[j]);
            out.centers[j] = SparseVector::from_dense(mean);
        } else {
            std::vector<double> c = state.centers[j].to_dense();
            const double shrink =
                1.0 - 2.0 * *eta * static_cast<double>(counts[j]);
            for (std::size_t t = 0; t < n; ++t)
                c[t] = c[t] * shrink + 2.0 * *eta * sums[j][t];
            out.centers[j] = SparseVector::from_dense(c);
        }
    }
    return out;
}

namespace {

void validate_config(const SparseMatrix& x, const EsckConfig& cfg) {
    require(cfg.r > 0 && cfg.r < x.cols(), ErrorKind::invalid_argument,
            "reduced dimension r must satisfy 0 < r < d");
    require(cfg.iters >= 1, ErrorKind::invalid_argument,
            "iteration count must be at least 1");
    if (cfg.eta)
        require(*cfg.eta > 0.0, ErrorKind::invalid_argument,
                "learning rate must be positive");
}

std::vector<std::vector<double>> init_centers(const SparseMatrix& m,
                                              const EsckConfig& cfg) {
    Rng rng = Rng::derive(cfg.seed, "esck/init");
    std::vector<SparseVector> chosen;
    chosen.reserve(static_cast<std::size_t>(cfg.r));
    const index_t max_attempts = cfg.r + m.cols();
    for (index_t attempt = 0;
         attempt < max_attempts &&
         chosen.size() < static_cast<std::size_t>(cfg.r);
         ++attempt) {
        const auto pick = static_cast<index_t>(
            rng.next_below(static_cast<std::uint64_t>(m.cols())));
        SparseVector candidate = m.column(pick);
        if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end())
            chosen.push_back(std::move(candidate));
    }
    require(chosen.size() == static_cast<std::size_t>(cfg.r),
            ErrorKind::invalid_argument,
            "fewer than r distinct columns available for initialization");
    std::vector<std::vector<double>> dense(chosen.size());
    for (std::size_t j = 0; j < chosen.size(); ++j) dense[j] = chosen[j].to_dense();
    return dense;
}

std::vector<double> project_center(const std::vector<double>& c,
                                   const ProjectionParams& params) {
    if (std::isinf(params.lambda)) return c;
    return epsilon_l1_project(c, params);
}

struct FitWorkspace {
    std::vector<double> col_sq;
    std::vector<std::int32_t> assign;
    std::vector<double> assigned_dist;
    std::vector<index_t> counts;
    std::vector<std::vector<double>> sums;
};

void assign_all(const SparseMatrix& m, const CenterCache& cache,
                FitWorkspace& ws) {
    for (index_t i = 0; i < m.cols(); ++i) {
        const auto iu = static_cast<std::size_t>(i);
        auto [cl, dist] = nearest_center(m, i, ws.col_sq[iu], cache);
        ws.assign[iu] = cl;
        ws.assigned_dist[iu] = dist;
    }
}

// reseed_farthest: give each empty cluster the column with the largest
// distance to its own center, in ascending cluster order. Only columns from
// clusters with more than one member are eligible, so reseeding never
// empties another cluster.
void handle_empty_clusters(const SparseMatrix& m, CenterCache& cache,
                           FitWorkspace& ws, const EsckConfig& cfg) {
    for (std::size_t j = 0; j < ws.counts.size(); ++j) {
        if (ws.counts[j] > 0) continue;
        if (cfg.empty_cluster_policy == EmptyClusterPolicy::drop_to_zero) {
            cache.set(j, std::vector<double>(static_cast<std::size_t>(m.rows()), 0.0));
            continue;
        }
        index_t farthest = -1;
        double farthest_dist = -1.0;
        for (index_t i = 0; i < m.cols(); ++i) {
            const auto iu = static_cast<std::size_t>(i);
            if (ws.counts[static_cast<std::size_t>(ws.assign[iu])] <= 1) continue;
            if (ws.assigned_dist[iu] > farthest_dist) {
                farthest_dist = ws.assigned_dist[iu];
                farthest = i;
            }
        }
        if (farthest < 0) continue; // nothing to steal
        const auto fu = static_cast<std::size_t>(farthest);
        --ws.counts[static_cast<std::size_t>(ws.assign[fu])];
        ws.assign[fu] = static_cast<std::int32_t>(j);
        ws.assigned_dist[fu] = 0.0;
        ws.counts[j] = 1;
        cache.set(j, m.column(farthest).to_dense());
    }
}

void accumulate_cluster_sums(const SparseMatrix& m, FitWorkspace& ws,
                             std::span<const index_t> columns) {
    for (auto& s : ws.sums) std::fill(s.begin(), s.end(), 0.0);
    std::fill(ws.counts.begin(), ws.counts.end(), index_t{0});
    for (index_t i : columns) {
        const auto iu = static_cast<std::size_t>(i);
        const auto cl = static_cast<std::size_t>(ws.assign[iu]);
        auto ids = m.column_indices(i);
        auto vals = m.column_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k)
            ws.sums[cl][static_cast<std::size_t>(ids[k])] += vals[k];
        ++ws.counts[cl];
    }
}

void update_centers(CenterCache& cache, FitWorkspace& ws,
                    const EsckConfig& cfg, double gradient_scale) {
    for (std::size_t j = 0; j < cache.dense.size(); ++j) {
        std::vector<double> c = cache.dense[j];
        if (!cfg.eta) {
            if (ws.counts[j] > 0) {
                c = ws.sums[j];
                for (double& v : c) v /= static_cast<double>(ws.counts[j]);
            }
        } else {
            const double step = 2.0 * *cfg.eta * gradient_scale;
            const double shrink = 1.0 - step * static_cast<double>(ws.counts[j]);
            for (std::size_t t = 0; t < c.size(); ++t)
                c[t] = c[t] * shrink + step * ws.sums[j][t];
        }
        cache.set(j, project_center(c, cfg.projection));
    }
}

EsckFitResult finish_fit(const SparseMatrix& m, const CenterCache& cache,
                         Indicator phi, SignDiagonal d_signs,
                         std::vector<double> history, int iters_run) {
    EsckFitResult result;
    result.centers.resize(cache.dense.size());
    for (std::size_t j = 0; j < cache.dense.size(); ++j)
        result.centers[j] = SparseVector::from_dense(cache.dense[j]);
    result.sketched = SparseMatrix::from_columns(m.rows(), result.centers);
    result.phi = std::move(phi);
    result.d_signs = std::move(d_signs);
    result.objective_history = std::move(history);
    result.iters_run = iters_run;
    return result;
}

CenterCache make_initial_cache(const SparseMatrix& m, const EsckConfig& cfg) {
    CenterCache cache;
    cache.n = m.rows();
    auto initial = init_centers(m, cfg);
    cache.dense.resize(initial.size());
    cache.sq_norm.resize(initial.size());
    for (std::size_t j = 0; j < initial.size(); ++j)
        cache.set(j, std::move(initial[j]));
    return cache;
}

EsckFitResult fit_full_batch(const SparseMatrix& x, const EsckConfig& cfg) {
    Rng sign_rng = Rng::derive(cfg.seed, "esck/signs");
    SignDiagonal d_signs = draw_sign_diagonal(sign_rng, x.cols());
    const SparseMatrix m = scale_columns_by_signs(x, d_signs);

    CenterCache cache = make_initial_cache(m, cfg);

    FitWorkspace ws;
    const auto d = static_cast<std::size_t>(m.cols());
    ws.col_sq.resize(d);
    for (index_t i = 0; i < m.cols(); ++i)
        ws.col_sq[static_cast<std::size_t>(i)] = column_sq_norm(m, i);
    ws.assign.resize(d);
    ws.assigned_dist.resize(d);
    ws.counts.resize(cache.dense.size());
    ws.sums.assign(cache.dense.size(),
                   std::vector<double>(static_cast<std::size_t>(m.rows()), 0.0));

    std::vector<index_t> all_columns(d);
    std::iota(all_columns.begin(), all_columns.end(), index_t{0});

    std::vector<double> history;
    Indicator phi;
    phi.cluster_count = cfg.r;
    int iters_run = 0;
    for (int iter = 0; iter < cfg.iters; ++iter) {
        assign_all(m, cache, ws);
        phi.cluster_of = ws.assign;
        const double objective =
            std::accumulate(ws.assigned_dist.begin(), ws.assigned_dist.end(), 0.0);
        history.push_back(objective);
        iters_run = iter + 1;
        if (cfg.early_stop && iter > 0) {
            const double prev = history[static_cast<std::size_t>(iter) - 1];
            if (std::abs(prev - objective) <=
                cfg.early_stop_tol * std::max(1.0, prev))
                break;
        }
        std::fill(ws.counts.begin(), ws.counts.end(), index_t{0});
        for (std::int32_t cl : ws.assign) ++ws.counts[static_cast<std::size_t>(cl)];
        handle_empty_clusters(m, cache, ws, cfg);
        phi.cluster_of = ws.assign;
        accumulate_cluster_sums(m, ws, all_columns);
        update_centers(cache, ws, cfg, 1.0);
    }
    return finish_fit(m, cache, std::move(phi), std::move(d_signs),
                      std::move(history), iters_run);
}

EsckFitResult fit_minibatch(const SparseMatrix& x, const EsckConfig& cfg) {
    Rng sign_rng = Rng::derive(cfg.seed, "esck/signs");
    SignDiagonal d_signs = draw_sign_diagonal(sign_rng, x.cols());
    const SparseMatrix m = scale_columns_by_signs(x, d_signs);

    CenterCache cache = make_initial_cache(m, cfg);

    FitWorkspace ws;
    const auto d = static_cast<std::size_t>(m.cols());
    ws.col_sq.resize(d);
    for (index_t i = 0; i < m.cols(); ++i)
        ws.col_sq[static_cast<std::size_t>(i)] = column_sq_norm(m, i);
    ws.assign.assign(d, 0);
    ws.assigned_dist.assign(d, 0.0);
    ws.counts.resize(cache.dense.size());
    ws.sums.assign(cache.dense.size(),
                   std::vector<double>(static_cast<std::size_t>(m.rows()), 0.0));

    Rng batch_rng = Rng::derive(cfg.seed, "esck/batch");
    const index_t b = cfg.batch_size;
    const double gradient_scale =
        static_cast<double>(m.cols()) / static_cast<double>(b);

    std::vector<index_t> pool(d);
    for (int iter = 0; iter < cfg.iters; ++iter) {
        std::iota(pool.begin(), pool.end(), index_t{0});
        for (index_t i = 0; i < b; ++i) {
            const auto pick = i + static_cast<index_t>(batch_rng.next_below(
                                      static_cast<std::uint64_t>(m.cols() - i)));
            std::swap(pool[static_cast<std::size_t>(i)],
                      pool[static_cast<std::size_t>(pick)]);
        }
        std::vector<index_t> batch(pool.begin(), pool.begin() + b);
        std::sort(batch.begin(), batch.end());

        for (index_t i : batch) {
            const auto iu = static_cast<std::size_t>(i);
            ws.assign[iu] = nearest_center(m, i, ws.col_sq[iu], cache).first;
        }
        // Clusters with no batch columns keep their centers this iteration.
        accumulate_cluster_sums(m, ws, batch);
        update_centers(cache, ws, cfg, gradient_scale);
    }

    std::vector<SparseVector> centers(cache.dense.size());
    for (std::size_t j = 0; j < cache.dense.size(); ++j)
        centers[j] = SparseVector::from_dense(cache.dense[j]);
    Indicator phi = assign_columns(m, centers);
    return finish_fit(m, cache, std::move(phi), std::move(d_signs), {},
                      cfg.iters);
}

} // namespace

EsckFitResult esck_fit(const SparseMatrix& x, const EsckConfig& config) {
    validate_config(x, config);
    return fit_full_batch(x, config);
}

EsckFitResult esck_fit_minibatch(const SparseMatrix& x,
                                 const EsckConfig& config) {
    validate_config(x, config);
    require(config.batch_size <= x.cols(), ErrorKind::invalid_argument,
            "batch size must not exceed the number of columns");
    // batch_size 0 or d degenerates to the full-batch trajectory.
    if (config.batch_size == 0 || config.batch_size == x.cols())
        return fit_full_batch(x, config);
    return fit_minibatch(x, config);
}

namespace {

MatrixVariant inductive_sparse(const SparseMatrix& x_new,
                               const SignDiagonal& d_signs,
                               const Indicator& phi,
                               const ScalingDiagonal& s, ApplyStats* stats) {
    const CsrView rows = make_row_view(x_new);
    std::vector<double> accum(static_cast<std::size_t>(phi.cluster_count), 0.0);
    std::vector<index_t> touched;
    std::vector<Triplet> triplets;
    std::uint64_t visited = 0;
    for (index_t i = 0; i < rows.rows; ++i) {
        touched.clear();
        auto ids = rows.row_indices(i);
        auto vals = rows.row_values(i);
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto j = static_cast<std::size_t>(ids[k]);
            const auto cl = static_cast<std::size_t>(phi.cluster_of[j]);
            if (accum[cl] == 0.0 &&
                std::find(touched.begin(), touched.end(),
                          static_cast<index_t>(cl)) == touched.end())
                touched.push_back(static_cast<index_t>(cl));
            accum[cl] += d_signs.signs[j] * s.values[cl] * vals[k];
            ++visited;
        }
        std::sort(touched.begin(), touched.end());
        for (index_t cl : touched) {
            const auto cu = static_cast<std::size_t>(cl);
            if (accum[cu] != 0.0) triplets.push_back({i, cl, accum[cu]});
            accum[cu] = 0.0;
        }
    }
    if (stats) stats->nonzeros_visited += visited;
    return SparseMatrix::from_triplets(x_new.rows(), phi.cluster_count, triplets);
}

void check_inductive_shapes(index_t cols, const SignDiagonal& d_signs,
                            const Indicator& phi) {
    require(cols == d_signs.dim, ErrorKind::shape,
            "shape mismatch: x.cols != sign diagonal dim");
    require(phi.cluster_of.size() == static_cast<std::size_t>(cols),
            ErrorKind::shape, "shape mismatch: x.cols != indicator length");
}

} // namespace

MatrixVariant inductive_transform(const SparseMatrix& x_new,
                                  const SignDiagonal& d_signs,
                                  const Indicator& phi, ApplyStats* stats) {
    check_inductive_shapes(x_new.cols(), d_signs, phi);
    return inductive_sparse(x_new, d_signs, phi, scaling_from_phi(phi), stats);
}

MatrixVariant inductive_transform(const DenseMatrix& x_new,
                                  const SignDiagonal& d_signs,
                                  const Indicator& phi, ApplyStats* stats) {
    check_inductive_shapes(x_new.cols(), d_signs, phi);
    const ScalingDiagonal s = scaling_from_phi(phi);
    DenseMatrix out(x_new.rows(), phi.cluster_count);
    std::uint64_t visited = 0;
    for (index_t i = 0; i < x_new.rows(); ++i) {
        auto in_row = x_new.row(i);
        auto out_row = out.row(i);
        for (index_t j = 0; j < x_new.cols(); ++j) {
            const double v = in_row[static_cast<std::size_t>(j)];
            if (v == 0.0) continue;
            const auto ju = static_cast<std::size_t>(j);
            const auto cl = static_cast<std::size_t>(phi.cluster_of[ju]);
            out_row[cl] += d_signs.signs[ju] * s.values[cl] * v;
            ++visited;
        }
    }
    if (stats) stats->nonzeros_visited += visited;
    return out;
}

namespace {

nlohmann::json sparse_vector_to_json(const SparseVector& v) {
    return {{"dim", v.dim}, {"idx", v.idx}, {"val", v.val}};
}

SparseVector sparse_vector_from_json(const nlohmann::json& j) {
    return SparseVector::checked(j.at("dim").get<index_t>(),
                                 j.at("idx").get<std::vector<index_t>>(),
                                 j.at("val").get<std::vector<double>>());
}

} // namespace

std::string esck_model_to_json(const EsckModel& model) {
    nlohmann::json j;
    j["format"] = "sketchbench.model";
    j["version"] = 1;
    j["kind"] = "esck";
    j["variant"] = model.variant;
    nlohmann::json signs = nlohmann::json::array();
    for (std::int8_t s : model.d_signs.signs) signs.push_back(static_cast<int>(s));
    j["d_signs"] = {{"dim", model.d_signs.dim}, {"signs", signs}};
    j["phi"] = {{"cluster_count", model.phi.cluster_count},
                {"cluster_of", model.phi.cluster_of}};
    j["scaling"] = {{"dim", model.scaling.dim}, {"values", model.scaling.values}};
    j["centers"] = nlohmann::json::array();
    for (const SparseVector& c : model.centers)
        j["centers"].push_back(sparse_vector_to_json(c));
    return j.dump();
}

EsckModel esck_model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::parse, std::string("bad model JSON: ") + e.what());
    }
    require(j.value("format", "") == "sketchbench.model" &&
                j.value("kind", "") == "esck",
            ErrorKind::parse, "not an esck model blob");
    EsckModel model;
    model.variant = j.at("variant").get<std::string>();
    std::vector<std::int8_t> signs;
    for (const auto& s : j.at("d_signs").at("signs"))
        signs.push_back(static_cast<std::int8_t>(s.get<int>()));
    model.d_signs = SignDiagonal::checked(std::move(signs));
    model.phi.cluster_count = j.at("phi").at("cluster_count").get<index_t>();
    model.phi.cluster_of =
        j.at("phi").at("cluster_of").get<std::vector<std::int32_t>>();
    model.scaling.dim = j.at("scaling").at("dim").get<index_t>();
    model.scaling.values = j.at("scaling").at("values").get<std::vector<double>>();
    for (const auto& c : j.at("centers"))
        model.centers.push_back(sparse_vector_from_json(c));
    return model;
}

} // namespace sketchbench
