#ifndef SAWFID_H
#define SAWFID_H

/* This file is generated by cbindgen from sawfid-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum SawfidStatus {
  SAWFID_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SAWFID_STATUS_NULL_POINTER = 1,
  /**
   * Arguments failed validation (range, finiteness, configuration).
   */
  SAWFID_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation ran but produced no usable result (for example no
   * saturation or a degenerate scaling window).
   */
  SAWFID_STATUS_NO_RESULT = 3,
  /**
   * A panic was caught at the boundary.
   */
  SAWFID_STATUS_INTERNAL_ERROR = 4,
} SawfidStatus;

/**
 * Opaque fidelity series handle.
 */
typedef struct SawfidSeries SawfidSeries;

/**
 * Result of a box-counting dimension fit.
 */
typedef struct SawfidDimension {
  /**
   * Estimated fractal dimension.
   */
  double dimension;
  /**
   * Standard error of the fitted log-log slope.
   */
  double std_error;
  /**
   * Goodness of fit of the log-log line.
   */
  double r_squared;
  /**
   * Fit window lower edge (strip width, samples).
   */
  double window_min;
  /**
   * Fit window upper edge (strip width, samples).
   */
  double window_max;
  /**
   * 1 when the fit is reliable (r² >= 0.9 and a plausible dimension).
   */
  int32_t reliable;
} SawfidDimension;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Computes a fidelity series for a Gaussian packet initial condition.
 *
 * On success `*out` owns a new handle that must be released with
 * `sawfid_series_free`.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum SawfidStatus sawfid_series_compute(uint32_t n_qubits,
                                        double chaos,
                                        double epsilon,
                                        uint64_t seed,
                                        double theta0,
                                        double momentum0,
                                        size_t t_max,
                                        struct SawfidSeries **out);

/**
 * Number of samples in the series (t_max + 1; index 0 holds F(0) = 1).
 *
 * # Safety
 * `series` must be null or a live handle from `sawfid_series_compute`.
 */
size_t sawfid_series_len(const struct SawfidSeries *series);

/**
 * Copies the fidelity values into `buf` (capacity `len` doubles).
 *
 * # Safety
 * `series` must be a live handle; `buf` must hold at least `len`
 * writable doubles.
 */
enum SawfidStatus sawfid_series_values(const struct SawfidSeries *series, double *buf, size_t len);

/**
 * Detects the transient cutoff t*; `SAWFID_STATUS_NO_RESULT` when the
 * series never saturates.
 *
 * # Safety
 * `series` must be a live handle; `out` must point to a writable
 * size_t.
 */
enum SawfidStatus sawfid_series_transient(const struct SawfidSeries *series, size_t *out);

/**
 * Releases a series handle. Null is ignored.
 *
 * # Safety
 * `series` must be null or a handle not freed before.
 */
void sawfid_series_free(struct SawfidSeries *series);

/**
 * Estimates the fractal dimension of an arbitrary sampled signal with
 * the modified box-counting estimator and an auto-detected scaling
 * window. `SAWFID_STATUS_NO_RESULT` marks signals with no scaling
 * region (flat or too short).
 *
 * # Safety
 * `signal` must point to `len` readable doubles; `out` must be
 * writable.
 */
enum SawfidStatus sawfid_box_dimension(const double *signal,
                                       size_t len,
                                       struct SawfidDimension *out);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sawfid_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SAWFID_H */
