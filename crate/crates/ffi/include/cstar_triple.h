#ifndef CSTAR_TRIPLE_H
#define CSTAR_TRIPLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `CSTAR_STATUS_OK` is zero; everything else is an error.
 */
typedef enum CstarStatus {
  CSTAR_STATUS_OK = 0,
  CSTAR_STATUS_NULL_POINTER = 1,
  CSTAR_STATUS_INVALID_ARGUMENT = 2,
  CSTAR_STATUS_DIMENSION_MISMATCH = 3,
  CSTAR_STATUS_NOT_POSITIVE = 4,
  CSTAR_STATUS_SINGULAR = 5,
  CSTAR_STATUS_OUTSIDE_BALL = 6,
  CSTAR_STATUS_NUMERICAL = 7,
  CSTAR_STATUS_CONFIG = 8,
  CSTAR_STATUS_PANIC = 9,
  CSTAR_STATUS_BUFFER_TOO_SMALL = 10,
} CstarStatus;

/**
 * Opaque module element (an `m×n` complex matrix).
 */
typedef struct CstarElement CstarElement;

/**
 * Opaque transvection `g_c` of the open unit ball.
 */
typedef struct CstarTransvection CstarTransvection;

/**
 * Output of [`cstar_classify`].
 */
typedef struct CstarClassification {
  bool is_extreme;
  bool is_tripotent;
  /**
   * `c*c = 1`.
   */
  bool family_full_norm;
  /**
   * `cc* = 1`.
   */
  bool family_full_range;
  double bergmann_norm;
} CstarClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or `""`. The
 * pointer stays valid until the next call into this library on the thread.
 */
const char *cstar_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cstar_version(void);

/**
 * Creates an `rows×cols` element from `2·rows·cols` interleaved doubles.
 *
 * # Safety
 * `data` must point to `2·rows·cols` readable doubles; `out` must be writable.
 */
enum CstarStatus cstar_element_new(size_t rows,
                                   size_t cols,
                                   const double *data,
                                   struct CstarElement **out);

/**
 * Releases an element. Null is ignored.
 *
 * # Safety
 * `e` must come from this library and not be used afterwards.
 */
void cstar_element_free(struct CstarElement *e);

/**
 * Row count, or 0 for null.
 *
 * # Safety
 * `e` must be null or a live element.
 */
size_t cstar_element_rows(const struct CstarElement *e);

/**
 * Column count, or 0 for null.
 *
 * # Safety
 * `e` must be null or a live element.
 */
size_t cstar_element_cols(const struct CstarElement *e);

/**
 * Copies the entries into `out` (row-major, interleaved). `len` is the
 * capacity in doubles and must be at least `2·rows·cols`.
 *
 * # Safety
 * `e` must be a live element and `out` must have room for `len` doubles.
 */
enum CstarStatus cstar_element_get(const struct CstarElement *e, double *out, size_t len);

/**
 * Module norm `‖x‖ = ‖x*x‖^{1/2}` (the largest singular value).
 *
 * # Safety
 * `e` must be a live element; `out` must be writable.
 */
enum CstarStatus cstar_module_norm(const struct CstarElement *e, double *out);

/**
 * `{x, y, z} = ½(x·y*z + z·y*x)` as a new element.
 *
 * # Safety
 * `x`, `y`, `z` must be live elements; `out` must be writable.
 */
enum CstarStatus cstar_triple_product(const struct CstarElement *x,
                                      const struct CstarElement *y,
                                      const struct CstarElement *z,
                                      struct CstarElement **out);

/**
 * `|‖{x,x,x}‖ − ‖x‖³| / (1 + ‖x‖³)`.
 *
 * # Safety
 * `x` must be a live element; `out` must be writable.
 */
enum CstarStatus cstar_cube_identity_residual(const struct CstarElement *x, double *out);

/**
 * Extreme-point classification of `c` (`‖c‖ ≤ 1`).
 *
 * # Safety
 * `c` must be a live element; `out` must be writable.
 */
enum CstarStatus cstar_classify(const struct CstarElement *c, struct CstarClassification *out);

/**
 * Builds `g_c` for a center `c` strictly inside the unit ball.
 *
 * # Safety
 * `c` must be a live element; `out` must be writable.
 */
enum CstarStatus cstar_transvection_new(const struct CstarElement *c,
                                        struct CstarTransvection **out);

/**
 * `g_c(x)` as a new element.
 *
 * # Safety
 * `t` must be a live transvection and `x` a live element; `out` must be writable.
 */
enum CstarStatus cstar_transvection_apply(const struct CstarTransvection *t,
                                          const struct CstarElement *x,
                                          struct CstarElement **out);

/**
 * Releases a transvection. Null is ignored.
 *
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void cstar_transvection_free(struct CstarTransvection *t);

/**
 * Runs the verification suites and returns the JSON report in `*out_json`
 * (free it with [`cstar_string_free`]). `dims` and `suite` may be null for
 * the defaults; `abs_tol <= 0` keeps the default tolerances. Property
 * failures are not an error: check `*out_passed`.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out_json` and
 * `out_passed` must be writable.
 */
enum CstarStatus cstar_run_suites_json(const char *dims,
                                       const char *suite,
                                       uint64_t trials,
                                       uint64_t seed,
                                       double abs_tol,
                                       char **out_json,
                                       bool *out_passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cstar_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSTAR_TRIPLE_H */
