#ifndef APGEO_H
#define APGEO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ApgeoStatus {
  APGEO_STATUS_OK = 0,
  APGEO_STATUS_INVALID_ARGUMENT = 1,
  APGEO_STATUS_VERIFICATION_FAILED = 2,
  APGEO_STATUS_CAP_EXCEEDED = 3,
  APGEO_STATUS_INTERNAL = 4,
  APGEO_STATUS_PANIC = 5,
} ApgeoStatus;

/**
 * An integer matrix.
 */
typedef struct ApgeoMatrix ApgeoMatrix;

/**
 * A certified progression witness.
 */
typedef struct ApgeoWitness ApgeoWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *apgeo_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void apgeo_string_free(char *s);

/**
 * Parse a row-major matrix such as `"2,1;1,1"`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum ApgeoStatus apgeo_matrix_parse(const char *text, struct ApgeoMatrix **out);

/**
 * # Safety
 * `m` must come from [`apgeo_matrix_parse`] and not be freed twice.
 */
void apgeo_matrix_free(struct ApgeoMatrix *m);

/**
 * `"a,b;c,d"` form of the matrix; free with [`apgeo_string_free`].
 *
 * # Safety
 * `m` must be a live matrix handle.
 */
char *apgeo_matrix_to_string(const struct ApgeoMatrix *m);

/**
 * Primitivity flags of a hyperbolic element of `SL(2, Z)`.
 *
 * # Safety
 * `m` must be a live handle; the output pointers must be writable.
 */
enum ApgeoStatus apgeo_primitivity(const struct ApgeoMatrix *m,
                                   bool *primitive,
                                   bool *absolutely_primitive);

/**
 * `n(gamma, eta_p^r)` for the `A1` element at the prime `p`.
 *
 * # Safety
 * `gamma` must be a live handle and `out` writable.
 */
enum ApgeoStatus apgeo_nfun(const struct ApgeoMatrix *gamma, uint64_t p, uint32_t r, uint64_t *out);

/**
 * Certified `k`-term progression over an absolutely primitive element.
 *
 * # Safety
 * `gamma` must be a live handle and `out` writable.
 */
enum ApgeoStatus apgeo_build_progression(const struct ApgeoMatrix *gamma,
                                         size_t k,
                                         struct ApgeoWitness **out);

/**
 * Certified `k`-term progression containing the length of a primitive element.
 *
 * # Safety
 * `gamma` must be a live handle and `out` writable.
 */
enum ApgeoStatus apgeo_build_progression_containing(const struct ApgeoMatrix *gamma,
                                                    size_t k,
                                                    struct ApgeoWitness **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ApgeoStatus apgeo_witness_from_json(const char *json, struct ApgeoWitness **out);

/**
 * Witness JSON; free with [`apgeo_string_free`].
 *
 * # Safety
 * `w` must be a live witness handle.
 */
char *apgeo_witness_to_json(const struct ApgeoWitness *w);

/**
 * Number of terms.
 *
 * # Safety
 * `w` must be a live witness handle.
 */
size_t apgeo_witness_len(const struct ApgeoWitness *w);

/**
 * The constant `C` and the multiplier of term `i` (0-based).
 *
 * # Safety
 * `w` must be a live witness handle; outputs must be writable.
 */
enum ApgeoStatus apgeo_witness_term(const struct ApgeoWitness *w,
                                    size_t i,
                                    uint64_t *c,
                                    uint64_t *multiplier);

/**
 * Re-check the witness. Returns `APGEO_STATUS_VERIFICATION_FAILED` and names
 * the failing checks in [`apgeo_last_error`] when it does not hold up.
 *
 * # Safety
 * `w` must be a live witness handle.
 */
enum ApgeoStatus apgeo_witness_verify(const struct ApgeoWitness *w);

/**
 * # Safety
 * `w` must come from this library and not be freed twice.
 */
void apgeo_witness_free(struct ApgeoWitness *w);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APGEO_H */
