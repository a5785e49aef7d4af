#ifndef RADIANT_H
#define RADIANT_H

/* Generated by cbindgen from radiant-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
enum RadiantStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  /**
   * Success.
   */
  RadiantStatus_Ok = 0,
  /**
   * A pointer argument was null or a scalar argument was out of domain.
   */
  RadiantStatus_InvalidArgument = 1,
  /**
   * The computation ran but did not produce a usable result.
   */
  RadiantStatus_NumericalFailure = 2,
  /**
   * The computation finished without reaching a verdict.
   */
  RadiantStatus_Inconclusive = 3,
};
#ifndef __cplusplus
typedef int32_t RadiantStatus;
#endif // __cplusplus

/**
 * Existence verdicts reported by [`radiant_classify`].
 */
enum RadiantVerdict
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  /**
   * A nontrivial bounded entire solution exists; no large solution does.
   */
  RadiantVerdict_Bounded = 0,
  /**
   * A large (boundary blow-up) entire solution exists; no bounded one does.
   */
  RadiantVerdict_Large = 1,
};
#ifndef __cplusplus
typedef int32_t RadiantVerdict;
#endif // __cplusplus

/**
 * A nonlinearity handle: separable `phi(r, t) = p(r) psi(t)`.
 */
typedef struct RadiantNonlinearity RadiantNonlinearity;

/**
 * A solved radial profile.
 */
typedef struct RadiantSolution RadiantSolution;

/**
 * A geometry handle: Euclidean `R^d` or a Damek-Ricci space.
 */
typedef struct RadiantSpace RadiantSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message for the most recent failure on the calling thread.
 *
 * The pointer stays valid until the next failing call on the same thread.
 * Never returns null; the message is empty if no failure has occurred.
 */
const char *radiant_last_error(void);

/**
 * Creates a Euclidean space handle of dimension `d >= 3`.
 *
 * # Safety
 * `out` must be a valid pointer to writable memory for one pointer.
 */
RadiantStatus radiant_space_euclidean(uint32_t d, struct RadiantSpace **out);

/**
 * Creates a Damek-Ricci space handle with Heisenberg parameters `(p, q)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable memory for one pointer.
 */
RadiantStatus radiant_space_damek_ricci(uint32_t p, uint32_t q, struct RadiantSpace **out);

/**
 * Releases a space handle. Accepts null.
 *
 * # Safety
 * `space` must be null or a pointer previously returned by a
 * `radiant_space_*` constructor that has not been freed.
 */
void radiant_space_free(struct RadiantSpace *space);

/**
 * Creates a separable nonlinearity `phi(r, t) = p(r) psi(t)` from spec
 * strings: `weight` is `constant[:v]`, `exp:rate[,v]`, or
 * `power:exponent[,v]`; `psi` is `linear`, `linear_plus_one`, `sqrt`, or
 * `power:gamma` with `0 < gamma <= 1`.
 *
 * # Safety
 * `weight` and `psi` must be valid nul-terminated strings; `out` must be a
 * valid pointer to writable memory for one pointer.
 */
RadiantStatus radiant_nonlinearity_separable(const char *weight,
                                             const char *psi,
                                             struct RadiantNonlinearity **out);

/**
 * Releases a nonlinearity handle. Accepts null.
 *
 * # Safety
 * `nl` must be null or a pointer previously returned by
 * `radiant_nonlinearity_separable` that has not been freed.
 */
void radiant_nonlinearity_free(struct RadiantNonlinearity *nl);

/**
 * Classifies `Lu = phi(r, u)` on the space: bounded versus large entire
 * solutions, decided by the convergence of the defining radial integral.
 *
 * # Safety
 * `space` and `nl` must be live handles from this library; `out` must be a
 * valid pointer to writable memory for one `RadiantVerdict`.
 */
RadiantStatus radiant_classify(const struct RadiantSpace *space,
                               const struct RadiantNonlinearity *nl,
                               double tol,
                               RadiantVerdict *out);

/**
 * Solves the Dirichlet problem `Lu = phi(r, u)` on the ball of radius
 * `ball_r` with constant boundary data `c >= 0`.
 *
 * # Safety
 * `space` and `nl` must be live handles from this library; `out` must be a
 * valid pointer to writable memory for one pointer.
 */
RadiantStatus radiant_solve_ball(const struct RadiantSpace *space,
                                 const struct RadiantNonlinearity *nl,
                                 double ball_r,
                                 double c,
                                 double tol,
                                 struct RadiantSolution **out);

/**
 * Number of grid nodes in the solution profile.
 *
 * # Safety
 * `sol` must be a live handle from this library.
 */
uintptr_t radiant_solution_len(const struct RadiantSolution *sol);

/**
 * Reads node `index` of the profile into `(*r, *u)`.
 *
 * # Safety
 * `sol` must be a live handle from this library; `r` and `u` must be valid
 * pointers to writable memory for one `double` each.
 */
RadiantStatus radiant_solution_node(const struct RadiantSolution *sol,
                                    uintptr_t index,
                                    double *r,
                                    double *u);

/**
 * Evaluates the profile at radius `r` (clamped to the covered interval).
 *
 * # Safety
 * `sol` must be a live handle from this library.
 */
double radiant_solution_eval(const struct RadiantSolution *sol, double r);

/**
 * The center value `u(0)`.
 *
 * # Safety
 * `sol` must be a live handle from this library.
 */
double radiant_solution_center(const struct RadiantSolution *sol);

/**
 * The fixed-point residual of the solve.
 *
 * # Safety
 * `sol` must be a live handle from this library.
 */
double radiant_solution_residual(const struct RadiantSolution *sol);

/**
 * Releases a solution handle. Accepts null.
 *
 * # Safety
 * `sol` must be null or a pointer previously returned by
 * `radiant_solve_ball` that has not been freed.
 */
void radiant_solution_free(struct RadiantSolution *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADIANT_H */
