#ifndef DEHNLAB_H
#define DEHNLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every exported function.
typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_POINTER = 1,
  // Malformed argument, such as a zero vector or a parameter out of range.
  DL_STATUS_INVALID_ARGUMENT = 2,
  // The point sits on the antidiagonal or the diagonal, where the map is undefined.
  DL_STATUS_SINGULAR = 3,
  // A quadrature or loop computation could not resolve its answer.
  DL_STATUS_NUMERICAL = 4,
  DL_STATUS_IO = 5,
  DL_STATUS_PARSE = 6,
  DL_STATUS_UNKNOWN_NAME = 7,
  // At least one check in a suite run did not pass. The JSON is still returned.
  DL_STATUS_CHECKS_FAILED = 8,
  DL_STATUS_PANIC = 9,
} DlStatus;

// Opaque handle to a solved compactification profile.
typedef struct DlProfile DlProfile;

// Numerical settings for check runs.
typedef struct DlConfig {
  uint64_t samples;
  uint64_t seed;
  double fd_step;
  double tol;
  size_t quad_nodes;
} DlConfig;

// A vector in R³.
typedef struct DlVec3 {
  double x;
  double y;
  double z;
} DlVec3;

// A point (x, y) of S² × S². Components are renormalized on input; zero or
// non-finite vectors are rejected.
typedef struct DlProductPoint {
  struct DlVec3 x;
  struct DlVec3 y;
} DlProductPoint;

// A covector at a point of S², stored as a tangent vector.
typedef struct DlCotangentPoint {
  struct DlVec3 base;
  struct DlVec3 covector;
} DlCotangentPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread, or NULL if none.
// The pointer stays valid until the next failing call on this thread.
const char *dl_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void dl_string_free(char *s);

// Fills `out` with the command-line defaults.
//
// # Safety
// `out` must be valid for writes.
enum DlStatus dl_config_default(struct DlConfig *out);

// The twist τ.
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_tau(const struct DlProductPoint *p, struct DlProductPoint *out);

// The inverse twist.
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_tau_inv(const struct DlProductPoint *p, struct DlProductPoint *out);

// The factor swap (x, y) ↦ (y, x).
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_swap(const struct DlProductPoint *p, struct DlProductPoint *out);

// Homotopy h_s from the identity (s = 0) to τ² (s = 1).
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_homotopy(double s, const struct DlProductPoint *p, struct DlProductPoint *out);

// Loop λ_t rotating the first factor about the second.
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_loop_lambda(double t, const struct DlProductPoint *p, struct DlProductPoint *out);

// Moment map |x + y|.
//
// # Safety
// `p` must be readable and `out` writable.
enum DlStatus dl_mu(const struct DlProductPoint *p, double *out);

// Solves the compactification profile. Release with [`dl_profile_free`].
//
// # Safety
// `out` must be valid for writes.
enum DlStatus dl_profile_build(struct DlProfile **out);

// Loads a profile table written by [`dl_profile_export`].
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum DlStatus dl_profile_import(const char *path, struct DlProfile **out);

// Releases a profile. NULL is ignored.
//
// # Safety
// `profile` must come from this library and not have been freed.
void dl_profile_free(struct DlProfile *profile);

// Writes the profile table as CSV.
//
// # Safety
// `profile` must be a live handle and `path` a NUL-terminated string.
enum DlStatus dl_profile_export(const struct DlProfile *profile, const char *path);

// Evaluates the profile f at s.
//
// # Safety
// `profile` must be a live handle and `out` writable.
enum DlStatus dl_profile_f(const struct DlProfile *profile, double s, double *out);

// The compactification map from the complement of the diagonal into the unit disc bundle.
//
// # Safety
// Pointers must be valid; `profile` must be a live handle.
enum DlStatus dl_phi(const struct DlProfile *profile,
                     const struct DlProductPoint *p,
                     struct DlCotangentPoint *out);

// Inverse of [`dl_phi`].
//
// # Safety
// Pointers must be valid; `profile` must be a live handle.
enum DlStatus dl_phi_inv(const struct DlProfile *profile,
                         const struct DlCotangentPoint *q,
                         struct DlProductPoint *out);

// τ transported to the disc bundle.
//
// # Safety
// Pointers must be valid; `profile` must be a live handle.
enum DlStatus dl_conjugated_twist(const struct DlProfile *profile,
                                  const struct DlCotangentPoint *q,
                                  struct DlCotangentPoint *out);

// Homology action of a named map (`id`, `swap`, `tau`, `tau-inv`, `tau2`),
// written row-major into `out[4]`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable for four values.
enum DlStatus dl_homology_matrix(const char *name, size_t nodes, int64_t *out);

// Runs one registered check and hands back the JSON report in `out_json`.
// The report is written for `DL_STATUS_OK` and `DL_STATUS_CHECKS_FAILED`.
//
// # Safety
// `name` must be a NUL-terminated string, `config` readable, `out_json` writable.
enum DlStatus dl_run_check(const char *name, const struct DlConfig *config, char **out_json);

// Runs every registered check. Same conventions as [`dl_run_check`].
//
// # Safety
// `config` must be readable and `out_json` writable.
enum DlStatus dl_verify_all(const struct DlConfig *config, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEHNLAB_H */
