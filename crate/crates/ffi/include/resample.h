#ifndef RESAMPLE_H
#define RESAMPLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_POINTER = 1,
  RS_STATUS_INVALID_ARGUMENT = 2,
  // The data violates a precondition (single class, NaN, shape, ...).
  RS_STATUS_DATA_INVARIANT = 3,
  // Oversampling ran out of attempts; the partial batch is still returned.
  RS_STATUS_BUDGET_EXHAUSTED = 4,
  RS_STATUS_IO = 5,
  // A Rust panic was caught at the boundary.
  RS_STATUS_INTERNAL = 6,
} RsStatus;

// Values accepted by the `algorithm` argument of [`rs_oversample`].
typedef enum RsAlgorithm {
  RS_ALGORITHM_SMOTE = 0,
  RS_ALGORITHM_ADASYN = 1,
  RS_ALGORITHM_G1NO = 2,
  RS_ALGORITHM_G1NO_GOURMET = 3,
} RsAlgorithm;

// Opaque synthetic batch handle.
typedef struct RsBatch RsBatch;

// Opaque dataset handle.
typedef struct RsDataset RsDataset;

// Generator counters of a batch.
typedef struct RsBatchCounters {
  size_t requested;
  size_t accepted;
  size_t rejected_by_1nn;
  size_t rejected_duplicate;
  size_t attempts;
} RsBatchCounters;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *rs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rs_version(void);

// Builds a dataset from `rows × cols` row-major values and `rows` labels
// (0 or 1). Classes are named "0" and "1".
//
// # Safety
// `samples` must point to `rows * cols` doubles and `labels` to `rows`
// bytes; `out` must be writable.
enum RsStatus rs_dataset_new(const double *samples,
                             size_t rows,
                             size_t cols,
                             const uint8_t *labels,
                             struct RsDataset **out);

// Loads a headed CSV. `label_column` is a column name or zero-based index;
// NULL selects the last column.
//
// # Safety
// `path` and a non-NULL `label_column` must be NUL-terminated strings;
// `out` must be writable.
enum RsStatus rs_dataset_load_csv(const char *path,
                                  const char *label_column,
                                  struct RsDataset **out);

// # Safety
// `dataset` must come from this library and not be used afterwards. NULL is
// ignored.
void rs_dataset_free(struct RsDataset *dataset);

// # Safety
// `dataset` must be a live handle and `out` writable.
enum RsStatus rs_dataset_rows(const struct RsDataset *dataset, size_t *out);

// # Safety
// `dataset` must be a live handle and `out` writable.
enum RsStatus rs_dataset_cols(const struct RsDataset *dataset, size_t *out);

// Copies the row-major samples into `buf`, which must hold exactly
// `rows * cols` values.
//
// # Safety
// `dataset` must be a live handle and `buf` writable for `len` doubles.
enum RsStatus rs_dataset_copy_samples(const struct RsDataset *dataset, double *buf, size_t len);

// Copies the class tags into `buf`, which must hold exactly `rows` bytes.
//
// # Safety
// `dataset` must be a live handle and `buf` writable for `len` bytes.
enum RsStatus rs_dataset_copy_labels(const struct RsDataset *dataset, uint8_t *buf, size_t len);

// Minority-to-majority count ratio.
//
// # Safety
// `dataset` must be a live handle and `out` writable.
enum RsStatus rs_dataset_imbalance_degree(const struct RsDataset *dataset, double *out);

// Silhouette coefficient of every row; `buf` must hold exactly `rows`
// values.
//
// # Safety
// `dataset` must be a live handle and `buf` writable for `len` doubles.
enum RsStatus rs_silhouette(const struct RsDataset *dataset, double *buf, size_t len);

// Generates enough minority samples to balance `dataset` with one of the
// [`RsAlgorithm`] values. `k` is used by SMOTE and ADASYN; 0 selects the
// default. On [`RsStatus::BudgetExhausted`] the partial batch is still
// written to `out` so that its counters can be read.
//
// # Safety
// `dataset` must be a live handle and `out` writable.
enum RsStatus rs_oversample(const struct RsDataset *dataset,
                            uint32_t algorithm,
                            size_t k,
                            uint64_t seed,
                            struct RsBatch **out);

// # Safety
// `batch` must be a live handle and `out` writable.
enum RsStatus rs_batch_rows(const struct RsBatch *batch, size_t *out);

// # Safety
// `batch` must be a live handle and `out` writable.
enum RsStatus rs_batch_cols(const struct RsBatch *batch, size_t *out);

// Copies the generated rows (row-major) into `buf`.
//
// # Safety
// `batch` must be a live handle and `buf` writable for `len` doubles.
enum RsStatus rs_batch_copy_samples(const struct RsBatch *batch, double *buf, size_t len);

// # Safety
// `batch` must be a live handle and `out` writable.
enum RsStatus rs_batch_counters(const struct RsBatch *batch, struct RsBatchCounters *out);

// # Safety
// `batch` must come from this library and not be used afterwards. NULL is
// ignored.
void rs_batch_free(struct RsBatch *batch);

// Area under the ROC curve of `scores` against 0/1 `labels` (1 positive).
//
// # Safety
// `scores` and `labels` must point to `len` elements; `out` must be
// writable.
enum RsStatus rs_roc_auc(const double *scores, const uint8_t *labels, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESAMPLE_H */
