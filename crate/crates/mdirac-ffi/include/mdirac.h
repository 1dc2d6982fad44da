/* C interface to the mdirac matrix Dirac equation toolkit. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes crossing the C boundary.
typedef enum MdiracStatus {
  // Success.
  MDIRAC_STATUS_OK = 0,
  // A required pointer was null.
  MDIRAC_STATUS_NULL_POINTER = 1,
  // Arguments failed shape, range, or parse validation.
  MDIRAC_STATUS_INVALID_INPUT = 2,
  // Input JSON failed to parse or had the wrong schema.
  MDIRAC_STATUS_BAD_JSON = 3,
  // A mathematical precondition was violated.
  MDIRAC_STATUS_CONSTRAINT_VIOLATION = 4,
  // The operation ran but a verification check failed.
  MDIRAC_STATUS_CHECK_FAILED = 5,
  // Internal failure (panic caught at the boundary).
  MDIRAC_STATUS_INTERNAL = 6,
} MdiracStatus;

// Opaque parameter pair handle.
typedef struct MdiracNk MdiracNk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the underlying library; static storage, do not free.
const char *mdirac_version(void);

// Message for the most recent failure on this thread; borrowed pointer,
// valid until the next failing call on the same thread. Do not free.
const char *mdirac_last_error(void);

// Free a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through an `out` parameter of
// this library and not freed before. Null is accepted and ignored.
void mdirac_string_free(char *s);

// Free a pair handle. Null is accepted and ignored.
//
// # Safety
// `nk` must be a handle returned by one of the constructors and not freed
// before.
void mdirac_nk_free(struct MdiracNk *nk);

// Standard pair N = 1, K = 0 of size l.
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_standard(uintptr_t l, double rel_tol, struct MdiracNk **out);

// 4×4 Jordan-block pair from complex z and y with z² + y² = 1, y ≠ 0.
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_example2(double z_re,
                                     double z_im,
                                     double y_re,
                                     double y_im,
                                     double rel_tol,
                                     struct MdiracNk **out);

// Load a pair from NkPair JSON ({"l", "N", "K", "provenance"}).
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_from_json(const char *json, double rel_tol, struct MdiracNk **out);

// Serialize a pair to NkPair JSON.
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_to_json(const struct MdiracNk *nk, char **out);

// Validate the consistency and two-level conditions; writes ValidationJson.
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_validate(const struct MdiracNk *nk, double rel_tol, char **out);

// Recover the canonical description; writes CanonicalJson.
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_nk_classify(const struct MdiracNk *nk, double rel_tol, char **out);

// Solve the plane-wave amplitude equation at covariant momentum p[4];
// writes PlaneWaveJson (an empty basis is a success, with dimension 0).
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_plane_wave(const struct MdiracNk *nk,
                                    const double *p,
                                    double m,
                                    double rel_tol,
                                    char **out);

// Run the full verification battery; writes the JSON report. Returns
// `CheckFailed` when any check fails (the report is still written).
//
// # Safety
// Pointer arguments must be valid for the duration of the call: handles
// must come from this library, strings must be NUL-terminated, `p` must
// point at four doubles, and `out` must be a valid location to write to.
enum MdiracStatus mdirac_verify_all(uint64_t seed,
                                    uintptr_t l,
                                    uintptr_t trials,
                                    uintptr_t sample_points,
                                    double rel_tol,
                                    double rank_cut,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
