#ifndef NCFOURIER_H
#define NCFOURIER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum NcfStatus {
  NCF_STATUS_OK = 0,
  NCF_STATUS_NULL_POINTER = 1,
  NCF_STATUS_INVALID_UTF8 = 2,
  NCF_STATUS_INVALID_ARGUMENT = 3,
  NCF_STATUS_SYNTAX = 4,
  NCF_STATUS_NOT_A_GROUP = 5,
  NCF_STATUS_DIMENSION_MISMATCH = 6,
  NCF_STATUS_UNKNOWN_CHECK = 7,
  /**
   * The call produced a result, but a solver did not close its bracket.
   */
  NCF_STATUS_NOT_CONVERGED = 8,
  /**
   * A verification check ran and failed; the report is still returned.
   */
  NCF_STATUS_CHECK_FAILED = 9,
  NCF_STATUS_NUMERICAL_FAILURE = 10,
  NCF_STATUS_IO = 11,
  NCF_STATUS_PANIC = 12,
} NcfStatus;

/**
 * Opaque unitary dual together with its group.
 */
typedef struct NcfDual NcfDual;

/**
 * Opaque finite group.
 */
typedef struct NcfGroup NcfGroup;

typedef struct NcfSolverConfig {
  size_t max_iter;
  double tol_rel;
  uint64_t seed;
  double admm_rho;
  double cone_damping;
} NcfSolverConfig;

typedef struct NcfFunctionNorms {
  double norm_a;
  double norm_adelta;
  double norm_agamma;
} NcfFunctionNorms;

typedef struct NcfSolverReport {
  double value;
  double lower_bracket;
  double upper_bracket;
  size_t iterations;
  double residual;
  bool converged;
} NcfSolverReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *ncf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ncf_version(void);

/**
 * Builds a group from a spec such as `s:3` or `product:cyclic:2,q8`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NcfStatus ncf_group_from_spec(const char *spec, struct NcfGroup **out);

/**
 * Builds a group from Cayley table text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NcfStatus ncf_group_from_cayley(const char *text, struct NcfGroup **out);

/**
 * Order of `g`, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live group handle.
 */
size_t ncf_group_order(const struct NcfGroup *g);

/**
 * # Safety
 * `g` must be null or a group handle not yet freed.
 */
void ncf_group_free(struct NcfGroup *g);

/**
 * Computes the unitary dual of `g`. The dual keeps its own copy of the group.
 *
 * # Safety
 * `g` must be a live group handle and `out` a valid pointer.
 */
enum NcfStatus ncf_dual_compute(const struct NcfGroup *g, uint64_t seed, struct NcfDual **out);

/**
 * Number of irreps, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live dual handle.
 */
size_t ncf_dual_len(const struct NcfDual *d);

/**
 * Writes the irrep dimensions into `dims`, which holds `capacity` entries.
 *
 * # Safety
 * `d` must be a live dual handle and `dims` valid for `capacity` writes.
 */
enum NcfStatus ncf_dual_dims(const struct NcfDual *d, size_t *dims, size_t capacity);

/**
 * # Safety
 * `d` must be null or a dual handle not yet freed.
 */
void ncf_dual_free(struct NcfDual *d);

/**
 * Defaults of the solvers.
 */
struct NcfSolverConfig ncf_solver_config_default(void);

/**
 * `‖u‖_A`, `‖u‖_{A_Δ}` and `‖u‖_{A_γ}` of a function given as `len`
 * interleaved complex values.
 *
 * # Safety
 * `d` must be a live dual handle, `values` valid for `2 len` reads and
 * `out` a valid pointer.
 */
enum NcfStatus ncf_function_norms(const struct NcfDual *d,
                                  const double *values,
                                  size_t len,
                                  struct NcfFunctionNorms *out);

/**
 * Quotient norm of `u` through `A(G×G)` by ADMM. `cfg` may be null for the
 * defaults. The report is written even when the status is `NotConverged`.
 *
 * # Safety
 * As for [`ncf_function_norms`]; `cfg` must be null or readable.
 */
enum NcfStatus ncf_quotient_norm(const struct NcfDual *d,
                                 const double *values,
                                 size_t len,
                                 const struct NcfSolverConfig *cfg,
                                 struct NcfSolverReport *out);

/**
 * cb norm of `Γ*(T)` for a block operator of `len` doubles.
 *
 * # Safety
 * `d` must be a live dual handle, `data` valid for `len` reads, `cfg` null
 * or readable and `out` a valid pointer.
 */
enum NcfStatus ncf_cb_norm_gamma_adjoint(const struct NcfDual *d,
                                         const double *data,
                                         size_t len,
                                         const struct NcfSolverConfig *cfg,
                                         struct NcfSolverReport *out);

/**
 * cb norm of `Γ̌*(T)` for a block operator of `len` doubles.
 *
 * # Safety
 * As for [`ncf_cb_norm_gamma_adjoint`].
 */
enum NcfStatus ncf_cb_norm_gamma_check_adjoint(const struct NcfDual *d,
                                               const double *data,
                                               size_t len,
                                               const struct NcfSolverConfig *cfg,
                                               struct NcfSolverReport *out);

/**
 * Runs one verification check on one group with its default trials and
 * tolerance, and returns the JSON report in `*json_out`, to be released
 * with [`ncf_string_free`]. The report is returned also when the status
 * is `CheckFailed` or `NotConverged`.
 *
 * # Safety
 * `check_id` and `group_spec` must be NUL-terminated strings and
 * `json_out` a valid pointer.
 */
enum NcfStatus ncf_verify_check(const char *check_id,
                                const char *group_spec,
                                uint64_t seed,
                                char **json_out);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ncf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCFOURIER_H */
