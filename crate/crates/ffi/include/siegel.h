#ifndef SIEGEL_H
#define SIEGEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SiegelStatus {
  SIEGEL_STATUS_OK = 0,
  SIEGEL_STATUS_NULL_POINTER = 1,
  SIEGEL_STATUS_INVALID_ARGUMENT = 2,
  SIEGEL_STATUS_UNSUPPORTED = 3,
  SIEGEL_STATUS_INSUFFICIENT_PRECISION = 4,
  SIEGEL_STATUS_POLE_OF_THETA = 5,
  SIEGEL_STATUS_OUT_OF_RANGE = 6,
  SIEGEL_STATUS_NUMERICAL = 7,
  SIEGEL_STATUS_PANIC = 8,
} SiegelStatus;

/**
 * Siegel invariants of every ray class, ordered by label.
 */
typedef struct SiegelInvariants SiegelInvariants;

/**
 * Ray class group of `Q(ζ_ℓ)` modulo `N`.
 */
typedef struct SiegelRayClasses SiegelRayClasses;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Release with
 * `siegel_string_free`.
 */
char *siegel_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void siegel_string_free(char *s);

/**
 * `θ(v, Z)` as decimal strings. `characteristic` is `1/5,2/5,0,3/5` or
 * `[1/5, 2/5; 0, 3/5]`; `point` lists `re:im` entries with `,` between
 * columns and `;` between rows.
 *
 * # Safety
 * Inputs must be valid NUL-terminated strings; outputs must be writable.
 */
enum SiegelStatus siegel_theta(const char *characteristic,
                               const char *point,
                               uint32_t prec,
                               char **out_re,
                               char **out_im);

/**
 * `Θ(v, Z)` at level `level`; arguments as for `siegel_theta`.
 *
 * # Safety
 * Inputs must be valid NUL-terminated strings; outputs must be writable.
 */
enum SiegelStatus siegel_big_theta(const char *characteristic,
                                   int64_t level,
                                   const char *point,
                                   uint32_t prec,
                                   char **out_re,
                                   char **out_im);

/**
 * # Safety
 * `out` must be writable.
 */
enum SiegelStatus siegel_ray_classes_new(uint32_t ell,
                                         int64_t level,
                                         struct SiegelRayClasses **out);

/**
 * Number of classes, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t siegel_ray_classes_order(const struct SiegelRayClasses *h);

/**
 * Writes up to `cap` cyclic factor orders into `out` and their count into
 * `len`.
 *
 * # Safety
 * `h` must be a live handle, `out` must hold `cap` values, `len` writable.
 */
enum SiegelStatus siegel_ray_classes_cyclic_orders(const struct SiegelRayClasses *h,
                                                   uint32_t *out,
                                                   size_t cap,
                                                   size_t *len);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void siegel_ray_classes_free(struct SiegelRayClasses *h);

/**
 * Computes the invariant of every ray class modulo `level` at `prec` bits.
 *
 * # Safety
 * `out` must be writable.
 */
enum SiegelStatus siegel_invariants_compute(uint32_t ell,
                                            int64_t level,
                                            uint32_t prec,
                                            struct SiegelInvariants **out);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t siegel_invariants_len(const struct SiegelInvariants *h);

/**
 * Value of class `C_label` (labels start at 1).
 *
 * # Safety
 * `h` must be a live handle; outputs must be writable.
 */
enum SiegelStatus siegel_invariants_value(const struct SiegelInvariants *h,
                                          size_t label,
                                          char **out_re,
                                          char **out_im);

/**
 * Characteristic numerators `k` of class `C_label`, so that `r = k / N`.
 * Writes up to `cap` values and the full count into `len`.
 *
 * # Safety
 * `h` must be a live handle, `out` must hold `cap` values, `len` writable.
 */
enum SiegelStatus siegel_invariants_r_vector(const struct SiegelInvariants *h,
                                             size_t label,
                                             int64_t *out,
                                             size_t cap,
                                             size_t *len);

/**
 * The table as JSON with keys `ell, N, prec_bits, cm_point, classes`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum SiegelStatus siegel_invariants_to_json(const struct SiegelInvariants *h, char **out);

/**
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void siegel_invariants_free(struct SiegelInvariants *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIEGEL_H */
