#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sketchbench/io.hpp"
#include "sketchbench/matrix.hpp"

namespace sketchbench {

// One-vs-rest linear model: row c of weights scores class c; the bias is a
// separate per-class term (trained as an appended constant feature).
struct LinearModel {
    DenseMatrix weights; // classes x dim
    std::vector<double> bias;
    index_t dim = 0;

    index_t classes() const { return weights.rows(); }
};

struct CvPlan {
    int folds = 5;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SvmOptions {
    double duality_gap_tol = 1e-3; // relative to the primal objective
    int max_epochs = 1000;
};

// L2-regularized L1-hinge SVM trained by dual coordinate descent on the
// averaged objective
//     0.5 ||w||^2 + (C / n) * sum_i max(0, 1 - y_i w.x_i)
// to the relative duality gap in options. Multi-class problems train one
// binary model per class. Deterministic for a fixed seed.
LinearModel train_linear_svm(const MatrixVariant& features,
                             const std::vector<std::int32_t>& labels,
                             index_t class_count, double c_value,
                             std::uint64_t seed,
                             const SvmOptions& options = {});

struct PredictStats {
    std::uint64_t multiply_adds = 0;
};

// Argmax of per-class scores; sparse rows touch only stored nonzeros.
std::vector<std::int32_t> predict(const LinearModel& model,
                                  const MatrixVariant& features,
                                  PredictStats* stats = nullptr);

double accuracy(const LinearModel& model, const MatrixVariant& features,
                const std::vector<std::int32_t>& labels);

std::string linear_model_to_json(const LinearModel& model);
LinearModel linear_model_from_json(const std::string& text);

// A sketching method as seen by the cross-validation harness: fit on the
// training fold (data-dependent methods never see held-out rows), then map
// any matrix with the fitted transform.
class Sketcher {
public:
    virtual ~Sketcher() = default;
    virtual std::string name() const = 0;
    virtual index_t output_dim() const = 0;
    virtual MatrixVariant fit_transform(const SparseMatrix& x_train,
                                        std::uint64_t seed) = 0;
    virtual MatrixVariant transform(const SparseMatrix& x) const = 0;
    // Fitted-model blob for reuse across runs; throws for sketchers without a
    // serializable form.
    virtual std::string to_json() const;
};

// Stratified fold ids: a disjoint cover with sizes differing by at most one,
// balanced per class. Deterministic for a fixed seed.
std::vector<std::vector<index_t>> make_folds(const std::vector<std::int32_t>& labels,
                                             int folds, std::uint64_t seed,
                                             bool stratified);

struct CvOptions {
    bool scale_minmax = false; // fit stats on each training fold only
    std::string dataset_id;    // defaults to ds.source
};

struct CvOutcome {
    BenchReport report;
    std::vector<double> fold_accuracies;
};

// Per fold: fit the sketcher on the training split, transform both splits,
// pick C on the training split with a nested stratified 80/20 holdout,
// retrain at the chosen C and score the held-out fold. Timing: embed_ms is
// the mean wall time of fit+transform of the training fold; predict_us is
// the per-sample median over 5 repeats of transform+classify of the held-out
// fold.
CvOutcome cross_validate(const Dataset& ds, Sketcher& sketcher,
                         const std::vector<double>& c_grid, const CvPlan& plan,
                         const CvOptions& options = {});

SparseMatrix select_rows(const SparseMatrix& m, std::span<const index_t> rows);
DenseMatrix select_rows(const DenseMatrix& m, std::span<const index_t> rows);
MatrixVariant select_rows(const MatrixVariant& m, std::span<const index_t> rows);

} // namespace sketchbench
