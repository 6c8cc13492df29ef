#ifndef XTFC_H
#define XTFC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum XtfcStatus {
  XTFC_STATUS_OK = 0,
  XTFC_STATUS_NULL_POINTER = 1,
  XTFC_STATUS_INVALID_ARGUMENT = 2,
  XTFC_STATUS_UNKNOWN_PROBLEM = 3,
  XTFC_STATUS_NUMERICAL = 4,
  XTFC_STATUS_IO = 5,
  XTFC_STATUS_PANIC = 6,
} XtfcStatus;

/**
 * Opaque run configuration.
 */
typedef struct XtfcConfig XtfcConfig;

/**
 * Opaque run report.
 */
typedef struct XtfcReport XtfcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *xtfc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xtfc_version(void);

/**
 * Creates a configuration holding the default hyperparameters of `problem`
 * (e.g. `"pde1"`) with the given seed.
 *
 * # Safety
 * `problem` must be a NUL-terminated string and `out` a writable pointer.
 */
enum XtfcStatus xtfc_config_new(const char *problem, uint64_t seed, struct XtfcConfig **out);

/**
 * Releases a configuration. Null is ignored.
 *
 * # Safety
 * `cfg` must come from [`xtfc_config_new`] and not be used afterwards.
 */
void xtfc_config_free(struct XtfcConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum XtfcStatus xtfc_config_set_neurons(struct XtfcConfig *cfg, size_t neurons);

/**
 * Sets the per-axis training point counts; `len` must equal the problem dimension.
 *
 * # Safety
 * `cfg` must be a live configuration handle and `counts` point to `len` values.
 */
enum XtfcStatus xtfc_config_set_points(struct XtfcConfig *cfg, const size_t *counts, size_t len);

/**
 * Sets the activation by name: `logistic`, `tanh`, `sin` or `gaussian`.
 *
 * # Safety
 * `cfg` must be a live configuration handle and `name` a NUL-terminated string.
 */
enum XtfcStatus xtfc_config_set_activation(struct XtfcConfig *cfg, const char *name);

/**
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum XtfcStatus xtfc_config_set_weight_range(struct XtfcConfig *cfg, double lo, double hi);

/**
 * Sets the Gauss-Newton stopping tolerance and iteration cap.
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum XtfcStatus xtfc_config_set_solver(struct XtfcConfig *cfg, double tol, size_t max_iter);

/**
 * Runs the solver. A run that stops without converging still succeeds;
 * check [`xtfc_report_converged`].
 *
 * # Safety
 * `cfg` must be a live configuration handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_run(const struct XtfcConfig *cfg, struct XtfcReport **out);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `report` must come from [`xtfc_run`] and not be used afterwards.
 */
void xtfc_report_free(struct XtfcReport *report);

/**
 * Maximum absolute error against the exact solution on the test grid.
 *
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_test_max_error(const struct XtfcReport *report, double *out);

/**
 * Mean absolute error against the exact solution on the test grid.
 *
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_test_mean_error(const struct XtfcReport *report, double *out);

/**
 * Maximum absolute error on the training points.
 *
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_train_max_error(const struct XtfcReport *report, double *out);

/**
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_iterations(const struct XtfcReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_converged(const struct XtfcReport *report, bool *out);

/**
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_solve_time(const struct XtfcReport *report, double *out);

/**
 * The full report as a JSON string, released with [`xtfc_string_free`].
 *
 * # Safety
 * `report` must be a live report handle and `out` a writable pointer.
 */
enum XtfcStatus xtfc_report_json(const struct XtfcReport *report, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void xtfc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XTFC_H */
