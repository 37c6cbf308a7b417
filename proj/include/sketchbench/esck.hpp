#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sketchbench/l1ball.hpp"
#include "sketchbench/matrix.hpp"
#include "sketchbench/sketchers.hpp"

namespace sketchbench {

enum class EmptyClusterPolicy { reseed_farthest, drop_to_zero };

struct EsckConfig {
    index_t r = 0;
    int iters = 20;
    // Unset selects the per-cluster rate 1/(2 * max(1, |cluster j|)), under
    // which a full-batch step lands exactly on the cluster mean (Lloyd step).
    std::optional<double> eta;
    ProjectionParams projection; // lambda = +inf disables the projection
    index_t batch_size = 0;      // 0 or >= d means full batch
    std::uint64_t seed = 0;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::reseed_farthest;
    bool early_stop = false;
    double early_stop_tol = 1e-6;
};

// Cluster membership indicator Phi stored as an index array: column i of M
// belongs to cluster cluster_of[i]. Exactly one cluster per column by
// construction.
struct Indicator {
    index_t cluster_count = 0;
    std::vector<std::int32_t> cluster_of;

    bool operator==(const Indicator&) const = default;
};

struct ClusterState {
    Indicator phi;
    std::vector<SparseVector> centers; // r vectors of length n
};

// S_ii = 1 / |cluster i| for nonempty clusters, 0 for empty ones.
struct ScalingDiagonal {
    index_t dim = 0;
    std::vector<double> values;

    bool operator==(const ScalingDiagonal&) const = default;
};

ScalingDiagonal scaling_from_phi(const Indicator& phi);

// Sum over columns of squared distance to the assigned center.
double kmeans_objective(const SparseMatrix& m, const ClusterState& state);

// || X - X D Phi S Phi^T D^T ||_F^2, evaluated by materializing the r
// cluster means of M = XD; the d x d projector is never formed.
double reconstruction_error(const SparseMatrix& x, const SignDiagonal& d_signs,
                            const Indicator& phi);

// Nearest-center assignment; ties break to the lowest cluster index.
Indicator assign_columns(const SparseMatrix& m,
                         const std::vector<SparseVector>& centers);

// -2 * sum over columns of cluster j of (M(:,i) - c_j); zero for an empty
// cluster.
std::vector<double> gradient_wrt_center(const SparseMatrix& m,
                                        const Indicator& phi,
                                        const std::vector<SparseVector>& centers,
                                        index_t j);

// One gradient-descent update of every center. An unset eta uses the
// per-cluster Lloyd rate.
ClusterState gd_step(const ClusterState& state, const SparseMatrix& m,
                     std::optional<double> eta);

struct EsckFitResult {
    SparseMatrix sketched; // n x r: the final centers, column j = c_j
    Indicator phi;
    SignDiagonal d_signs;
    std::vector<SparseVector> centers;
    std::vector<double> objective_history; // full-batch fits only
    int iters_run = 0;
};

EsckFitResult esck_fit(const SparseMatrix& x, const EsckConfig& config);
EsckFitResult esck_fit_minibatch(const SparseMatrix& x, const EsckConfig& config);

// X~ = X D Phi S for unseen rows, streaming each stored nonzero exactly once:
// out[row, a(j)] += sign_j * S_{a(j)} * x[row, j].
MatrixVariant inductive_transform(const SparseMatrix& x_new,
                                  const SignDiagonal& d_signs,
                                  const Indicator& phi,
                                  ApplyStats* stats = nullptr);
MatrixVariant inductive_transform(const DenseMatrix& x_new,
                                  const SignDiagonal& d_signs,
                                  const Indicator& phi,
                                  ApplyStats* stats = nullptr);

// Everything inductive_transform needs at serving time.
struct EsckModel {
    std::string variant; // "esck_full" or "esck_minibatch"
    SignDiagonal d_signs;
    Indicator phi;
    ScalingDiagonal scaling;
    std::vector<SparseVector> centers;
};

std::string esck_model_to_json(const EsckModel& model);
EsckModel esck_model_from_json(const std::string& text);

} // namespace sketchbench
