#ifndef GRCOB_H
#define GRCOB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GrcobStatus {
  GRCOB_STATUS_OK = 0,
  GRCOB_STATUS_NULL_POINTER = 1,
  GRCOB_STATUS_INVALID_UTF8 = 2,
  GRCOB_STATUS_MALFORMED_JSON = 3,
  GRCOB_STATUS_INVALID_GAF = 4,
  GRCOB_STATUS_MISMATCH = 5,
  GRCOB_STATUS_INVALID_ALGEBRA = 6,
  GRCOB_STATUS_RANK_UNSUPPORTED = 7,
  GRCOB_STATUS_PANIC = 8,
} GrcobStatus;

/**
 * A graded commutative Frobenius algebra.
 */
typedef struct GrcobAlgebra GrcobAlgebra;

/**
 * A marked gaf `B -> A`.
 */
typedef struct GrcobGaf GrcobGaf;

/**
 * The value of an evaluation, with the algebra it lives over.
 */
typedef struct GrcobMap GrcobMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null.
 */
const char *grcob_last_error(void);

/**
 * Library version as a static string.
 */
const char *grcob_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void grcob_string_free(char *s);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum GrcobStatus grcob_gaf_from_json(const char *json, struct GrcobGaf **out);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_gaf_to_json(const struct GrcobGaf *g, char **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not used afterwards.
 */
void grcob_gaf_free(struct GrcobGaf *g);

/**
 * Relative Euler characteristic `|V| - |E|`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_gaf_chi(const struct GrcobGaf *g, int64_t *out);

/**
 * `g ∘ h` for `g: B -> A`, `h: C -> B`.
 *
 * # Safety
 * `g`, `h` must be live handles and `out` writable.
 */
enum GrcobStatus grcob_compose(const struct GrcobGaf *g,
                               const struct GrcobGaf *h,
                               struct GrcobGaf **out);

/**
 * # Safety
 * `g`, `h` must be live handles and `out` writable.
 */
enum GrcobStatus grcob_tensor(const struct GrcobGaf *g,
                              const struct GrcobGaf *h,
                              struct GrcobGaf **out);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_reduce(const struct GrcobGaf *g, struct GrcobGaf **out);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_minimize(const struct GrcobGaf *g, struct GrcobGaf **out);

/**
 * Degree of the determinant line `ξ_d`.
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_xi_degree(const struct GrcobGaf *g, int64_t d, int64_t *out);

/**
 * Sign (+1 or -1) of the composition isomorphism for `g ∘ h`.
 *
 * # Safety
 * `g`, `h` must be live handles and `out` writable.
 */
enum GrcobStatus grcob_xi_compose_sign(const struct GrcobGaf *g,
                                       const struct GrcobGaf *h,
                                       int64_t d,
                                       int32_t *out);

/**
 * One of the bundled algebras: `s2`, `t2`, `cp2`, `s1`, `ground`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` writable.
 */
enum GrcobStatus grcob_algebra_bundled(const char *name, struct GrcobAlgebra **out);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` writable.
 */
enum GrcobStatus grcob_algebra_from_json(const char *json, struct GrcobAlgebra **out);

/**
 * # Safety
 * `a` must be null or a handle from this library, not used afterwards.
 */
void grcob_algebra_free(struct GrcobAlgebra *a);

/**
 * # Safety
 * `g`, `a` must be live handles and `out` writable.
 */
enum GrcobStatus grcob_evaluate(const struct GrcobGaf *g,
                                const struct GrcobAlgebra *a,
                                struct GrcobMap **out);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_map_degree(const struct GrcobMap *m, int64_t *out);

/**
 * Sparse entries as JSON with coefficients as `"p/q"` strings.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum GrcobStatus grcob_map_to_json(const struct GrcobMap *m, char **out);

/**
 * # Safety
 * `m` must be null or a handle from this library, not used afterwards.
 */
void grcob_map_free(struct GrcobMap *m);

/**
 * Number of spine objects of rank `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum GrcobStatus grcob_spine_count(size_t n, size_t *out);

/**
 * Betti numbers of the twisted spine complex as a JSON array.
 *
 * # Safety
 * `out` must be writable.
 */
enum GrcobStatus grcob_spine_betti(size_t n, int64_t d, bool experimental, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GRCOB_H */
