#ifndef QMETRO_H
#define QMETRO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmStatus {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_UTF8 = 2,
  QM_STATUS_SCHEMA = 3,
  QM_STATUS_NUMERIC = 4,
  QM_STATUS_INFEASIBLE = 5,
  QM_STATUS_INCOMPLETE_POVM = 6,
  QM_STATUS_BUFFER_TOO_SMALL = 7,
  QM_STATUS_PANIC = 8,
} QmStatus;

/**
 * Prepared model together with the configuration its reports embed.
 */
typedef struct QmModel QmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse and prepare a model. `config_json` may be null; otherwise it is a
 * run configuration object and replaces the tolerances embedded in the
 * model.
 *
 * # Safety
 * `model_json` and a non-null `config_json` are NUL-terminated strings;
 * `out` is valid for a pointer write.
 */
enum QmStatus qm_model_from_json(const char *model_json,
                                 const char *config_json,
                                 struct QmModel **out);

/**
 * # Safety
 * `model` is null or a handle from [`qm_model_from_json`] not yet freed.
 */
void qm_model_free(struct QmModel *model);

/**
 * Hilbert-space dimension, or 0 for a null handle.
 *
 * # Safety
 * `model` is null or a live handle.
 */
size_t qm_model_dim(const struct QmModel *model);

/**
 * Number of parameters, or 0 for a null handle.
 *
 * # Safety
 * `model` is null or a live handle.
 */
size_t qm_model_num_params(const struct QmModel *model);

/**
 * Row-major QFIM into `out`, which holds `len >= s*s` doubles.
 *
 * # Safety
 * `model` is a live handle and `out` is valid for `len` writes.
 */
enum QmStatus qm_model_qfim(const struct QmModel *model, double *out, size_t len);

/**
 * Analysis report as JSON.
 *
 * # Safety
 * `model` is a live handle and `out_json` is valid for a pointer write.
 */
enum QmStatus qm_model_analyze(const struct QmModel *model, char **out_json);

/**
 * Construction report as JSON. The report is written even when no
 * saturating measurement exists, in which case the status is
 * [`QmStatus::Infeasible`].
 *
 * # Safety
 * `model` is a live handle and `out_json` is valid for a pointer write.
 */
enum QmStatus qm_model_construct(const struct QmModel *model, uint64_t seed, char **out_json);

/**
 * Verification report for a POVM given as `{"vectors": ..., "weights": ...}`.
 *
 * # Safety
 * `model` is a live handle, `povm_json` a NUL-terminated string and
 * `out_json` valid for a pointer write.
 */
enum QmStatus qm_model_verify(const struct QmModel *model, const char *povm_json, char **out_json);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void qm_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *qm_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *qm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMETRO_H */
