#ifndef PROCELL_H
#define PROCELL_H

/* Generated by cbindgen from procell-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum PcStatus {
  /**
   * Success.
   */
  PC_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PC_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  PC_STATUS_UTF8 = 2,
  /**
   * Input could not be parsed (JSON, field or scalar syntax, labels).
   */
  PC_STATUS_PARSE = 3,
  /**
   * A mathematical operation failed (unknown cell, mismatch, bounds).
   */
  PC_STATUS_MATH = 4,
  /**
   * The datum was processed but fails axiom verification.
   */
  PC_STATUS_AXIOM_FAILURE = 5,
  /**
   * An internal invariant was violated.
   */
  PC_STATUS_INTERNAL = 6,
} PcStatus;

/**
 * Opaque handle to an immutable cell datum.
 */
typedef struct PcDatum PcDatum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. The pointer stays
 * valid until the next library call on the same thread. Never NULL.
 */
const char *pc_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void pc_string_free(char *s);

/**
 * Frees a datum handle. NULL is ignored.
 *
 * # Safety
 * `d` must have been returned by this library and not freed before.
 */
void pc_datum_free(struct PcDatum *d);

/**
 * Loads a finite datum from the JSON interchange format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum PcStatus pc_datum_from_json(const char *json, struct PcDatum **out);

/**
 * Builds the Temperley-Lieb datum TL_n(delta). `delta` is an exact scalar
 * string, `field` is `q` or `gf:p`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid.
 */
enum PcStatus pc_datum_builtin_tl(uint32_t n,
                                  const char *delta,
                                  const char *field,
                                  struct PcDatum **out);

/**
 * Builds the polynomial datum truncated at the principal coideal of `k`.
 *
 * # Safety
 * `field` must be NUL-terminated; `out` must be valid.
 */
enum PcStatus pc_datum_builtin_poly(uint64_t truncate, const char *field, struct PcDatum **out);

/**
 * Dimension of the datum (its basis size).
 *
 * # Safety
 * `d` must be a live handle; `out` must be valid.
 */
enum PcStatus pc_datum_dimension(const struct PcDatum *d, uintptr_t *out);

/**
 * Serializes the datum to the JSON interchange format.
 *
 * # Safety
 * `d` must be a live handle; `out` must be valid.
 */
enum PcStatus pc_datum_export_json(const struct PcDatum *d, char **out);

/**
 * Runs the exhaustive axiom verification. Writes the JSON report either
 * way; returns `PcStatusAxiomFailure` when any axiom fails.
 *
 * # Safety
 * `d` must be a live handle; `out` must be valid.
 */
enum PcStatus pc_verify_json(const struct PcDatum *d, char **out);

/**
 * Classification table (dim W, dim L, membership in the nonvanishing-form
 * index set) as JSON.
 *
 * # Safety
 * `d` must be a live handle; `out` must be valid.
 */
enum PcStatus pc_classify_json(const struct PcDatum *d, char **out);

/**
 * Gram matrix of one cell as JSON `{cell, rank, matrix}` with bit-exact
 * scalar strings.
 *
 * # Safety
 * `d` must be a live handle; `cell` NUL-terminated; `out` valid.
 */
enum PcStatus pc_gram_json(const struct PcDatum *d, const char *cell, char **out);

/**
 * Smooth-simple classification of the completed polynomial datum within
 * the window generated by `bound`, as a JSON list of `{cell, dim_l}`.
 *
 * # Safety
 * `field` must be NUL-terminated; `out` must be valid.
 */
enum PcStatus pc_poly_smooth_classify_json(uint64_t bound, const char *field, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROCELL_H */
