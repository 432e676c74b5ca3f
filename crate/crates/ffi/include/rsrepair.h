#ifndef RSREPAIR_H
#define RSREPAIR_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_POINTER = 1,
  /**
   * Bad parameters (composite modulus, index out of range, ...).
   */
  RS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Malformed JSON or mismatched transcript.
   */
  RS_STATUS_PARSE = 3,
  RS_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * No polynomial matches the transcript.
   */
  RS_STATUS_INCONSISTENT = 5,
  /**
   * Several polynomials match and disagree where it matters.
   */
  RS_STATUS_AMBIGUOUS = 6,
  /**
   * An output buffer is too small; the needed length was written.
   */
  RS_STATUS_BUFFER_TOO_SMALL = 7,
  /**
   * The operation does not apply to this kind of scheme.
   */
  RS_STATUS_WRONG_SCHEME = 8,
  /**
   * A panic was caught at the boundary.
   */
  RS_STATUS_INTERNAL = 9,
} RsStatus;

/**
 * Opaque scheme handle.
 */
typedef struct RsScheme RsScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Three-bit repair scheme for node `ell` on the points `0..=n`.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum RsStatus rs_scheme_kloosterman(uint64_t p, uint64_t n, uint64_t ell, struct RsScheme **out);

/**
 * `bits`-bit full-length decoding scheme with dimension `k` and the
 * `missing_len` silent nodes in `missing`. Fails for inadmissible `k`.
 *
 * # Safety
 * `missing` must point to `missing_len` values (or be null when it is 0);
 * `out` must be valid for writing a pointer.
 */
enum RsStatus rs_scheme_weil(uint64_t p,
                             uint32_t bits,
                             size_t k,
                             const uint64_t *missing,
                             size_t missing_len,
                             struct RsScheme **out);

/**
 * Scheme from a JSON descriptor such as
 * `{"type":"weil","p":101,"B":3,"k":4,"missing":[0,1],"t":13}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writing.
 */
enum RsStatus rs_scheme_from_json(const char *json, struct RsScheme **out);

/**
 * Releases a scheme. Null is ignored.
 *
 * # Safety
 * `s` must come from a constructor in this library and not be used after.
 */
void rs_scheme_free(struct RsScheme *s);

/**
 * Writes the scheme's JSON descriptor; free it with [`rs_string_free`].
 *
 * # Safety
 * `s` must be a live handle; `out` must be valid for writing.
 */
enum RsStatus rs_scheme_descriptor_json(const struct RsScheme *s, char **out);

/**
 * Field size, code dimension, bucket width and bits per node.
 *
 * # Safety
 * `s` must be a live handle; each non-null output must be writable.
 */
enum RsStatus rs_scheme_params(const struct RsScheme *s,
                               uint64_t *p,
                               size_t *k,
                               uint64_t *t,
                               uint32_t *bits_per_node);

/**
 * Total bits sent by all participating nodes.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum RsStatus rs_scheme_bandwidth(const struct RsScheme *s, uint64_t *out);

/**
 * Indices of the participating nodes, ascending. `len` receives the
 * count even when the buffer is too small.
 *
 * # Safety
 * `s` must be a live handle; `out` must hold `cap` values.
 */
enum RsStatus rs_scheme_nodes(const struct RsScheme *s, uint64_t *out, size_t cap, size_t *len);

/**
 * Bucket index of every participating node for the polynomial with the
 * given coefficients.
 *
 * # Safety
 * `s` must be a live handle; `coeffs` must hold `ncoeffs` values and
 * `out` `cap` values.
 */
enum RsStatus rs_scheme_leak(const struct RsScheme *s,
                             const uint64_t *coeffs,
                             size_t ncoeffs,
                             uint64_t *out,
                             size_t cap,
                             size_t *len);

/**
 * Recovers the polynomial (`k` coefficients) from the buckets.
 *
 * # Safety
 * `s` must be a live handle; `buckets` must hold `nbuckets` values and
 * `out` `cap` values.
 */
enum RsStatus rs_scheme_decode(const struct RsScheme *s,
                               const uint64_t *buckets,
                               size_t nbuckets,
                               uint64_t *out,
                               size_t cap);

/**
 * Recovers the target symbol of a repair scheme.
 *
 * # Safety
 * `s` must be a live handle; `buckets` must hold `nbuckets` values and
 * `out` must be writable.
 */
enum RsStatus rs_scheme_repair(const struct RsScheme *s,
                               const uint64_t *buckets,
                               size_t nbuckets,
                               uint64_t *out);

/**
 * Runs the window check for the scheme. `budget` of 0 means the default.
 * A failed check is not an error: `passed` is set to false.
 *
 * # Safety
 * `s` must be a live handle; `passed` must be writable.
 */
enum RsStatus rs_scheme_check(const struct RsScheme *s, uint64_t budget, bool *passed);

/**
 * Transcript JSON (the CLI file format) for a polynomial.
 *
 * # Safety
 * As for [`rs_scheme_leak`]; `out` receives a string to free with
 * [`rs_string_free`].
 */
enum RsStatus rs_transcript_json(const struct RsScheme *s,
                                 const uint64_t *coeffs,
                                 size_t ncoeffs,
                                 char **out);

/**
 * Decodes a transcript JSON document; writes
 * `{"coefficients":[...],"candidates":1}`.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum RsStatus rs_decode_json(const char *json, char **out);

/**
 * Repairs from a transcript JSON document; writes
 * `{"node":..,"value":..,"candidates":..}`.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum RsStatus rs_repair_json(const char *json, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used after.
 */
void rs_string_free(char *s);

/**
 * `sum_{nu=1}^{len} e_p(a/nu + b nu)`.
 *
 * # Safety
 * `re` and `im` must be writable.
 */
enum RsStatus rs_kloosterman_sum(uint64_t p,
                                 uint64_t a,
                                 uint64_t b,
                                 uint64_t len,
                                 double *re,
                                 double *im);

/**
 * `sum_{x in F_p} e_p(f(x))` for residue coefficients `coeffs`.
 *
 * # Safety
 * `coeffs` must hold `ncoeffs` values; `re` and `im` must be writable.
 */
enum RsStatus rs_weil_sum(uint64_t p,
                          const uint64_t *coeffs,
                          size_t ncoeffs,
                          double *re,
                          double *im);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *rs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSREPAIR_H */
