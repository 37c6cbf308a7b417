/* C API for the sketchbench library.
 *
 * All functions return skb_status; SKB_OK is 0. On failure a thread-local
 * message is available through skb_last_error(). Objects are opaque handles
 * created by skb_*_open/fit/... calls and released with the matching
 * skb_*_free. Strings returned through char** out-parameters are owned by
 * the caller and released with skb_string_free.
 */
#ifndef SKETCHBENCH_H
#define SKETCHBENCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKB_API __declspec(dllexport)
#else
#define SKB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t skb_status;

enum {
    SKB_OK = 0,
    SKB_ERR_INVALID_ARGUMENT = 1,
    SKB_ERR_PARSE = 2,
    SKB_ERR_IO = 3,
    SKB_ERR_SHAPE = 4,
    SKB_ERR_INTERNAL = 5,
};

typedef struct skb_dataset skb_dataset;
typedef struct skb_sketcher skb_sketcher;
typedef struct skb_matrix skb_matrix;
typedef struct skb_model skb_model;

SKB_API const char* skb_version(void);
SKB_API const char* skb_status_name(skb_status status);
/* Message describing the most recent failure on this thread. */
SKB_API const char* skb_last_error(void);
SKB_API void skb_string_free(char* str);

/* ---- datasets (LIBSVM text format) ---- */

/* forced_dim <= 0 infers the dimension from the largest feature index. */
SKB_API skb_status skb_dataset_open_libsvm(const char* path, int64_t forced_dim,
                                           skb_dataset** out);
SKB_API skb_status skb_dataset_dims(const skb_dataset* ds, int64_t* rows,
                                    int64_t* cols, int64_t* classes);
SKB_API skb_status skb_dataset_sparsity(const skb_dataset* ds, double* out);
SKB_API void skb_dataset_free(skb_dataset* ds);

/* ---- sketchers ----
 *
 * method: gaussian | achlioptas | countsketch | srht | srht_topr |
 *         esck_full | esck_minibatch | identity
 * params_json: optional (may be NULL) JSON object with keys lambda, epsilon,
 * iters, batch_size.
 */
SKB_API skb_status skb_sketcher_fit(const skb_dataset* train, const char* method,
                                    int64_t r, uint64_t seed,
                                    const char* params_json, skb_sketcher** out);
SKB_API skb_status skb_sketcher_transform(const skb_sketcher* sketcher,
                                          const skb_dataset* data,
                                          skb_matrix** out);
/* Self-describing model blob (JSON). Baseline and esck sketchers round-trip;
 * the identity sketcher is not serializable. */
SKB_API skb_status skb_sketcher_to_json(const skb_sketcher* sketcher, char** out);
SKB_API skb_status skb_sketcher_from_json(const char* blob, skb_sketcher** out);
SKB_API void skb_sketcher_free(skb_sketcher* sketcher);

/* ---- matrices produced by transforms ---- */

SKB_API skb_status skb_matrix_dims(const skb_matrix* m, int64_t* rows,
                                   int64_t* cols);
SKB_API skb_status skb_matrix_nnz(const skb_matrix* m, int64_t* out);
SKB_API skb_status skb_matrix_sparsity(const skb_matrix* m, double* out);
/* labels may be NULL, in which case every row is labeled "0". */
SKB_API skb_status skb_matrix_write_libsvm(const skb_matrix* m,
                                           const int32_t* labels, size_t n,
                                           const char* path);
SKB_API void skb_matrix_free(skb_matrix* m);

/* ---- linear classifier ---- */

SKB_API skb_status skb_model_train(const skb_matrix* features,
                                   const int32_t* labels, size_t n,
                                   int64_t class_count, double c_value,
                                   uint64_t seed, skb_model** out);
/* predictions must hold at least the row count of features. */
SKB_API skb_status skb_model_predict(const skb_model* model,
                                     const skb_matrix* features,
                                     int32_t* predictions);
SKB_API skb_status skb_model_to_json(const skb_model* model, char** out);
SKB_API skb_status skb_model_from_json(const char* blob, skb_model** out);
SKB_API void skb_model_free(skb_model* model);

/* ---- experiment driver ----
 *
 * config_json keys: data (path), methods (list), r (list), seeds (list),
 * lambda (list), epsilon, iters, batch_size, c_grid (list), folds, scale
 * ("none"|"minmax"), out, format ("csv"|"json"), jobs, sweep (""|"r"|"lambda").
 *
 * skb_bench_run / skb_sweep_run return a JSON document with the result rows,
 * per-cell errors and the config echo; skb_result_write renders it to CSV or
 * JSON at `path`.
 */
SKB_API skb_status skb_bench_run(const char* config_json, char** result_json);
SKB_API skb_status skb_sweep_run(const char* config_json, char** result_json);
SKB_API skb_status skb_result_write(const char* result_json, const char* format,
                                    const char* path);
/* Sketches a whole file and writes embedding + sidecar; returns a small JSON
 * summary (paths, sparsity, embed_ms). */
SKB_API skb_status skb_sketch_file(const char* config_json, char** result_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SKETCHBENCH_H */
