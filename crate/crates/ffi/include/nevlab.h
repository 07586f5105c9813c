#ifndef NEVLAB_H
#define NEVLAB_H

/* Generated with cbindgen:0.27.0 */

/* This header is generated by cbindgen from nevlab-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the CLI exit codes: 0 success, 1 parse, 2
// hypothesis violation, 3 numeric non-convergence.
typedef enum NevlabStatus {
  NEVLAB_STATUS_OK = 0,
  NEVLAB_STATUS_PARSE_ERROR = 1,
  NEVLAB_STATUS_HYPOTHESIS_VIOLATION = 2,
  NEVLAB_STATUS_NUMERIC_ERROR = 3,
  NEVLAB_STATUS_NULL_ARGUMENT = 4,
  NEVLAB_STATUS_INTERNAL_ERROR = 5,
} NevlabStatus;

// Opaque handle to a holomorphic curve.
typedef struct NevlabCurve {
  uint8_t _opaque[0];
} NevlabCurve;

// Opaque handle to a hypersurface.
typedef struct NevlabHypersurface {
  uint8_t _opaque[0];
} NevlabHypersurface;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failing call on this thread. The pointer is
// valid until the next failing call on the same thread.
const char *nevlab_last_error_message(void);

// Parse a curve description `{n, R0, coords}` into a handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum NevlabStatus nevlab_curve_parse_json(const char *json, struct NevlabCurve **out);

// Release a curve handle. Passing NULL is a no-op.
//
// # Safety
// `ptr` must come from [`nevlab_curve_parse_json`] and not be freed twice.
void nevlab_curve_free(struct NevlabCurve *ptr);

// Parse a hypersurface description `{n, d, terms}` into a handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum NevlabStatus nevlab_hypersurface_parse_json(const char *json, struct NevlabHypersurface **out);

// Release a hypersurface handle. Passing NULL is a no-op.
//
// # Safety
// `ptr` must come from [`nevlab_hypersurface_parse_json`].
void nevlab_hypersurface_free(struct NevlabHypersurface *ptr);

// Characteristic profile T_{f, O(twist)} on a linear grid; `out_values`
// must hold `points` doubles.
//
// # Safety
// `curve` must be a live handle and `out_values` writable for `points`.
enum NevlabStatus nevlab_characteristic(const struct NevlabCurve *curve,
                                        int64_t twist,
                                        double rmin,
                                        double rmax,
                                        uintptr_t points,
                                        double *out_values);

// First Main Theorem residual profile; `out_values` must hold `points`
// doubles.
//
// # Safety
// Handles must be live and `out_values` writable for `points`.
enum NevlabStatus nevlab_fmt_residual(const struct NevlabCurve *curve,
                                      const struct NevlabHypersurface *divisor,
                                      double rmin,
                                      double rmax,
                                      uintptr_t points,
                                      double *out_values);

// Defect liminf estimate (tail minimum of the defect ratio profile).
//
// # Safety
// Handles must be live and `out_liminf` a valid pointer.
enum NevlabStatus nevlab_defect_estimate(const struct NevlabCurve *curve,
                                         const struct NevlabHypersurface *divisor,
                                         int64_t a_twist,
                                         uint32_t mu0,
                                         double rmin,
                                         double rmax,
                                         uintptr_t points,
                                         double *out_liminf);

// Full exact degree-arithmetic report as a JSON string; `d` may be NULL
// to skip the decomposition. Free the string with [`nevlab_string_free`].
//
// # Safety
// `d` is either NULL or a NUL-terminated decimal string; `out_json` must
// be a valid pointer.
enum NevlabStatus nevlab_degree_report_json(uint32_t n, uint32_t c, const char *d, char **out_json);

// Release a string returned by this library. Passing NULL is a no-op.
//
// # Safety
// `ptr` must come from a nevlab function returning an owned string.
void nevlab_string_free(char *ptr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEVLAB_H */
