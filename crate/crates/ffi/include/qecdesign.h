#ifndef QECDESIGN_H
#define QECDESIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdStatus {
  QD_STATUS_OK = 0,
  /**
   * Null pointer or a path that is not UTF-8.
   */
  QD_STATUS_NULL_ARGUMENT = 1,
  QD_STATUS_INVALID_INPUT = 2,
  QD_STATUS_ABOVE_THRESHOLD = 3,
  QD_STATUS_INFEASIBLE = 4,
  QD_STATUS_IO = 5,
  QD_STATUS_CORRUPT_MODEL = 6,
  QD_STATUS_INTERNAL = 7,
} QdStatus;

/**
 * Opaque trained model.
 */
typedef struct QdModel QdModel;

typedef struct QdPrediction {
  double raw_distance;
  uint32_t rounded_distance;
  double raw_rounds;
  uint32_t rounded_rounds;
} QdPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qd_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next `qd_*` call on the same thread.
 */
const char *qd_last_error_message(void);

/**
 * Loads a model file. On success `*out` owns a handle for `qd_model_free`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum QdStatus qd_model_load(const char *path, struct QdModel **out);

/**
 * Releases a handle from `qd_model_load`. NULL is ignored.
 *
 * # Safety
 * `model` must come from `qd_model_load` and not have been freed.
 */
void qd_model_free(struct QdModel *model);

/**
 * Recommends code parameters for one noise profile and target rate.
 *
 * # Safety
 * `model` must be a live handle and `out` a writable pointer.
 */
enum QdStatus qd_model_predict(const struct QdModel *model,
                               double depolarizing,
                               double gate,
                               double reset,
                               double readout,
                               double target,
                               struct QdPrediction *out);

/**
 * Rounds a raw distance up to the next odd integer, at least 3.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum QdStatus qd_round_distance(double raw, uint32_t *out);

/**
 * Rounds a raw round count up, at least 1.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum QdStatus qd_round_rounds(double raw, uint32_t *out);

/**
 * Logical error rate under the default oracle.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum QdStatus qd_oracle_logical_error_rate(uint32_t distance,
                                           uint32_t rounds,
                                           double depolarizing,
                                           double gate,
                                           double reset,
                                           double readout,
                                           double *out);

/**
 * Smallest (distance, rounds) on the default grid whose oracle rate meets
 * `target`. Returns `QD_STATUS_INFEASIBLE` when none does.
 *
 * # Safety
 * `distance` and `rounds` must be writable pointers.
 */
enum QdStatus qd_find_optimal_params(double depolarizing,
                                     double gate,
                                     double reset,
                                     double readout,
                                     double target,
                                     uint32_t *distance,
                                     uint32_t *rounds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QECDESIGN_H */
