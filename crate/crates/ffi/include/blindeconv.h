#ifndef BLINDECONV_H
#define BLINDECONV_H

/* Generated by cbindgen from blindeconv-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum BdStatus {
  // Success.
  BD_STATUS_OK = 0,
  // A required pointer argument was null.
  BD_STATUS_NULL_ARG = 1,
  // Arguments were structurally invalid (empty series, bad sizes, ...).
  BD_STATUS_INVALID_INPUT = 2,
  // The criterion never crossed zero below the scan ceiling.
  BD_STATUS_NO_ROOT = 3,
  // Every random search start failed.
  BD_STATUS_ALL_STARTS_FAILED = 4,
  // A recovery step hit a degenerate matrix or polynomial.
  BD_STATUS_DEGENERATE = 5,
  // Operating-system I/O failure.
  BD_STATUS_IO = 6,
  // A caller-provided buffer was shorter than the queried length.
  BD_STATUS_SHORT_BUFFER = 7,
  // An internal invariant was violated (a panic was caught).
  BD_STATUS_INTERNAL_PANIC = 8,
} BdStatus;

// Opaque handle to a completed estimation: noise level, normalized filter,
// recovered support points, and weights.
typedef struct BdResult BdResult;

// Opaque handle to an observation series.
typedef struct BdSeries BdSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never null; the string is owned by
// the library and must not be freed.
const char *bd_status_message(enum BdStatus status);

// Builds a series from parallel real/imaginary arrays of length `n`.
//
// # Safety
// `re` and `im` must point to `n` readable doubles; `out` must be a valid
// destination for one pointer.
enum BdStatus bd_series_new(const double *re, const double *im, size_t n, struct BdSeries **out);

// Releases a series handle; null is ignored.
//
// # Safety
// `series` must be a pointer returned by this library and not yet freed.
void bd_series_free(struct BdSeries *series);

// Number of samples; zero when the handle is null.
//
// # Safety
// `series` must be a live handle from this library, or null.
size_t bd_series_len(const struct BdSeries *series);

// Copies the samples into parallel `re`/`im` arrays of length `len`, which
// must equal `bd_series_len`.
//
// # Safety
// `re` and `im` must point to `len` writable doubles.
enum BdStatus bd_series_samples(const struct BdSeries *series, double *re, double *im, size_t len);

// Simulates the three-point mixture preset (identity channel).
//
// # Safety
// `out` must be a valid destination for one pointer.
enum BdStatus bd_simulate_mixture(double sigma0, size_t n, uint64_t seed, struct BdSeries **out);

// Simulates the autoregressive preset (same alphabet, order-2 recursion).
//
// # Safety
// `out` must be a valid destination for one pointer.
enum BdStatus bd_simulate_ar2(double sigma0, size_t n, uint64_t seed, struct BdSeries **out);

// Runs the full pipeline: noise-level/filter search followed by support and
// weight recovery. `half_width` is the filter window half-width, `p` the
// assumed alphabet size, `n_starts` the number of random search starts
// (0 selects the default).
//
// # Safety
// `y` must be a live series handle; `out` must be a valid destination for
// one pointer.
enum BdStatus bd_estimate(const struct BdSeries *y,
                          size_t half_width,
                          size_t p,
                          uint64_t seed,
                          size_t n_starts,
                          struct BdResult **out);

// Releases a result handle; null is ignored.
//
// # Safety
// `result` must be a pointer returned by this library and not yet freed.
void bd_result_free(struct BdResult *result);

// Estimated noise scale; NaN when the handle is null.
//
// # Safety
// `result` must be a live handle from this library, or null.
double bd_result_sigma(const struct BdResult *result);

// Criterion residual `|J|` at the fitted point; NaN when null.
//
// # Safety
// `result` must be a live handle from this library, or null.
double bd_result_j_residual(const struct BdResult *result);

// Window index of the dominant filter tap.
//
// # Safety
// `result` must be a live handle from this library, or null.
size_t bd_result_delay(const struct BdResult *result);

// Length of the normalized filter (the full window `2*half_width + 1`).
//
// # Safety
// `result` must be a live handle from this library, or null.
size_t bd_result_filter_len(const struct BdResult *result);

// Copies the unit-norm, sign-fixed filter into `dst` (`len` doubles).
//
// # Safety
// `dst` must point to `len` writable doubles.
enum BdStatus bd_result_filter(const struct BdResult *result, double *dst, size_t len);

// Number of recovered support points.
//
// # Safety
// `result` must be a live handle from this library, or null.
size_t bd_result_alphabet_len(const struct BdResult *result);

// Copies the support points (canonical order) into parallel `re`/`im`
// arrays of `len` doubles each.
//
// # Safety
// `re` and `im` must point to `len` writable doubles.
enum BdStatus bd_result_alphabet(const struct BdResult *result, double *re, double *im, size_t len);

// Copies the recovered weights (matched to the support points) into `dst`.
//
// # Safety
// `dst` must point to `len` writable doubles.
enum BdStatus bd_result_weights(const struct BdResult *result, double *dst, size_t len);

// 1 when a recovered weight was negative (the run would be eliminated from
// benchmark averages), else 0.
//
// # Safety
// `result` must be a live handle from this library, or null.
int32_t bd_result_weights_negative(const struct BdResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLINDECONV_H */
