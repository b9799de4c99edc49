/* C interface to the aew library. Generated; do not edit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code returned by every fallible function in this library.
typedef enum AewStatus {
  // Success.
  AEW_STATUS_OK = 0,
  // A required pointer argument was null.
  AEW_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  AEW_STATUS_UTF8 = 2,
  // An argument was outside the domain of the operation
  // (empty dataset, dimension mismatch, bad parameter, bad config).
  AEW_STATUS_INVALID_ARGUMENT = 3,
  // Valid input that exceeds a documented implementation limit.
  AEW_STATUS_CAPACITY = 4,
  // Unparseable input (CSV or JSON).
  AEW_STATUS_PARSE = 5,
  // A mathematical invariant that should hold by construction failed.
  AEW_STATUS_INVARIANT_VIOLATION = 6,
  // An I/O operation failed.
  AEW_STATUS_IO = 7,
  // An internal panic was caught.
  AEW_STATUS_INTERNAL = 8,
} AewStatus;

// An owned set of labeled examples. Opaque.
typedef struct AewDataset AewDataset;

// A finite dictionary of score functions. Opaque.
typedef struct AewDictionary AewDictionary;

// A joint distribution over features and labels. Opaque.
typedef struct AewDistribution AewDistribution;

// The quantities certifying the exponential-weights risk bound:
// `slack = min_member_hinge_risk + log_m_over_n - aggregate_hinge_risk`,
// nonnegative up to rounding.
typedef struct AewCertificate {
  // Empirical hinge risk of the weighted aggregate.
  double aggregate_hinge_risk;
  // Smallest empirical hinge risk over dictionary members.
  double min_member_hinge_risk;
  // log(dictionary size) divided by the sample size.
  double log_m_over_n;
  // Bound minus achieved risk; at least -1e-9.
  double slack;
} AewCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *aew_version(void);

// Message from the most recent failed call on the calling thread, or null
// if none has failed. The pointer stays valid until the next failed call
// on the same thread.
const char *aew_last_error_message(void);

// Builds a dataset from flat arrays: `xs` holds `n` rows of `dim` features
// in row-major order, `labels` holds `n` entries, each +1 or -1.
//
// # Safety
// `xs` must be valid for `n * dim` reads, `labels` for `n` reads, and
// `out` for one write.
enum AewStatus aew_dataset_from_arrays(uintptr_t dim,
                                       uintptr_t n,
                                       const double *xs,
                                       const int32_t *labels,
                                       struct AewDataset **out);

// Loads a dataset from a CSV file with header `x1,...,xd,label`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one write.
enum AewStatus aew_dataset_load_csv(const char *path, struct AewDataset **out);

// Number of examples, or 0 if `data` is null.
//
// # Safety
// `data` must be null or a live dataset handle.
uintptr_t aew_dataset_len(const struct AewDataset *data);

// Feature dimension, or 0 if `data` is null.
//
// # Safety
// `data` must be null or a live dataset handle.
uintptr_t aew_dataset_dim(const struct AewDataset *data);

// Releases a dataset handle. Accepts null.
//
// # Safety
// `data` must be null or a handle not freed before.
void aew_dataset_free(struct AewDataset *data);

// Parses a dictionary from JSON (`{"schema_version": 1, "members": [...]}`)
// and resolves each member rule at feature dimension `dim`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` valid for one write.
enum AewStatus aew_dictionary_from_json(const char *json,
                                        uintptr_t dim,
                                        struct AewDictionary **out);

// Number of members, or 0 if `dict` is null.
//
// # Safety
// `dict` must be null or a live dictionary handle.
uintptr_t aew_dictionary_len(const struct AewDictionary *dict);

// Releases a dictionary handle. Accepts null.
//
// # Safety
// `dict` must be null or a handle not freed before.
void aew_dictionary_free(struct AewDictionary *dict);

// Computes the exponential weights of every dictionary member on `data`.
// `len` must equal the dictionary size; weights are written in member order
// and sum to one.
//
// # Safety
// `data` and `dict` must be live handles; `out_weights` must be valid for
// `len` writes.
enum AewStatus aew_exponential_weights(const struct AewDataset *data,
                                       const struct AewDictionary *dict,
                                       double *out_weights,
                                       uintptr_t len);

// Computes the empirical-risk certificate for the exponential-weights
// aggregate on `data`.
//
// # Safety
// `data` and `dict` must be live handles; `out` must be valid for one write.
enum AewStatus aew_certificate(const struct AewDataset *data,
                               const struct AewDictionary *dict,
                               struct AewCertificate *out);

// Writes the 0-based index of a member minimizing the empirical zero-one
// risk on `data` (ties go to the earliest member).
//
// # Safety
// `data` and `dict` must be live handles; `out_index` must be valid for one
// write.
enum AewStatus aew_erm_select(const struct AewDataset *data,
                              const struct AewDictionary *dict,
                              uintptr_t *out_index);

// Parses a distribution from JSON, e.g. `{"finite": {...}}`,
// `{"lower_bound": {...}}`, `{"holder_sinusoid": {...}}`, or
// `{"holder_bump": {...}}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` valid for one write.
enum AewStatus aew_distribution_from_json(const char *json, struct AewDistribution **out);

// Feature dimension, or 0 if `dist` is null.
//
// # Safety
// `dist` must be null or a live distribution handle.
uintptr_t aew_distribution_dim(const struct AewDistribution *dist);

// Writes the Bayes risk (the smallest achievable zero-one risk).
//
// # Safety
// `dist` must be a live handle; `out_risk` must be valid for one write.
enum AewStatus aew_distribution_bayes_risk(const struct AewDistribution *dist, double *out_risk);

// Draws `n` independent examples with the given seed into a new dataset
// handle. The same seed yields the same sample.
//
// # Safety
// `dist` must be a live handle; `out` must be valid for one write.
enum AewStatus aew_distribution_sample(const struct AewDistribution *dist,
                                       uintptr_t n,
                                       uint64_t seed,
                                       struct AewDataset **out);

// Releases a distribution handle. Accepts null.
//
// # Safety
// `dist` must be null or a handle not freed before.
void aew_distribution_free(struct AewDistribution *dist);

// Fits the local-polynomial regression estimator of smoothness `beta` on
// `train` and evaluates it at `n_queries` points. `queries` holds rows of
// `aew_dataset_dim(train)` coordinates. For query `i`, `out_eta[i]` is the
// estimated conditional probability of label +1, clipped to [0, 1], and
// `out_labels[i]` is +1 when it is at least one half, else -1.
//
// # Safety
// `train` must be a live handle; with `n_queries > 0`, `queries` must be
// valid for `n_queries * dim` reads and `out_eta`, `out_labels` for
// `n_queries` writes.
enum AewStatus aew_plugin_predict(const struct AewDataset *train,
                                  double beta,
                                  const double *queries,
                                  uintptr_t n_queries,
                                  double *out_eta,
                                  int32_t *out_labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
