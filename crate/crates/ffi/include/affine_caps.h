#ifndef AFFINE_CAPS_H
#define AFFINE_CAPS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_NULL_POINTER = 1,
  AC_STATUS_INVALID_PRIME = 2,
  AC_STATUS_INVALID_DIGITS = 3,
  AC_STATUS_DIVISIBILITY = 4,
  AC_STATUS_TOO_LARGE = 5,
  AC_STATUS_PARSE = 6,
  AC_STATUS_ERROR = 7,
  AC_STATUS_PANIC = 8,
} AcStatus;

/**
 * Opaque digit-set pair.
 */
typedef struct AcPair AcPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a pair. `fixed` may be null when `n_fixed` is 0.
 *
 * # Safety
 * `digits` and `fixed` must point to `n_digits` and `n_fixed` readable
 * values; `out` must be writable.
 */
enum AcStatus ac_pair_new(uint32_t p,
                          const uint32_t *digits,
                          size_t n_digits,
                          const uint32_t *fixed,
                          size_t n_fixed,
                          struct AcPair **out);

/**
 * # Safety
 * `pair` must come from [`ac_pair_new`] and not be freed twice.
 */
void ac_pair_free(struct AcPair *pair);

/**
 * # Safety
 * `pair` must be a live handle and `admissible` writable.
 */
enum AcStatus ac_pair_check(const struct AcPair *pair, bool *admissible);

/**
 * Full certificate bundle as canonical JSON.
 *
 * # Safety
 * `pair` must be a live handle and `out_json` writable.
 */
enum AcStatus ac_pair_check_json(const struct AcPair *pair, char **out_json);

/**
 * Exact size of `S(D, D', n)` as a decimal string.
 *
 * # Safety
 * `pair` must be a live handle and `out_decimal` writable.
 */
enum AcStatus ac_cap_count(const struct AcPair *pair, size_t n, char **out_decimal);

/**
 * Builds `S(D, D', n)` and checks it for collinear triples.
 *
 * # Safety
 * `pair` must be a live handle and `is_cap` writable.
 */
enum AcStatus ac_cap_verify(const struct AcPair *pair, size_t n, bool *is_cap);

/**
 * Re-checks a bundle produced by [`ac_pair_check_json`] or the CLI.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `ok` writable.
 */
enum AcStatus ac_certificate_verify_json(const char *json, bool *ok);

/**
 * # Safety
 * `out` must be writable.
 */
enum AcStatus ac_equation_class_count(uint32_t p, size_t *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum AcStatus ac_eg_constant(uint32_t p, double *out);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void ac_string_free(char *s);

/**
 * Static description of a status code.
 */
const char *ac_status_message(enum AcStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* AFFINE_CAPS_H */
