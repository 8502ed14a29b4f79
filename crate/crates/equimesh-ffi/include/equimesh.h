#ifndef EQUIMESH_H
#define EQUIMESH_H

/* This file is generated by cbindgen from equimesh-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum EqmStatus {
  EQM_STATUS_OK = 0,
  EQM_STATUS_NULL_POINTER = 1,
  EQM_STATUS_INVALID_ARGUMENT = 2,
  EQM_STATUS_INVALID_ADAPTATION_FUNCTION = 3,
  EQM_STATUS_NUMERIC_ERROR = 4,
  EQM_STATUS_ILL_POSED_PROBLEM = 5,
  EQM_STATUS_SINGULAR_SYSTEM = 6,
  EQM_STATUS_OUT_OF_DOMAIN = 7,
  EQM_STATUS_UNSUPPORTED = 8,
  EQM_STATUS_IO_ERROR = 9,
  EQM_STATUS_PANIC = 10,
} EqmStatus;

/**
 * Which stopping criterion ended an adaptive run.
 */
typedef enum EqmConvergedBy {
  EQM_CONVERGED_BY_QUALITY = 0,
  EQM_CONVERGED_BY_MESH_DIFF = 1,
  EQM_CONVERGED_BY_MAX_ITER = 2,
} EqmConvergedBy;

/**
 * Opaque mesh handle.
 */
typedef struct EqmMesh EqmMesh;

/**
 * Opaque problem handle.
 */
typedef struct EqmProblem EqmProblem;

/**
 * Opaque adaptive-result handle.
 */
typedef struct EqmResult EqmResult;

/**
 * Opaque solution handle.
 */
typedef struct EqmSolution EqmSolution;

/**
 * Iteration controls of an adaptive run.
 */
typedef struct EqmAdaptOptions {
  double kappa;
  double tol_mesh;
  size_t max_iter;
} EqmAdaptOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *eqm_last_error_message(void);

/**
 * Reaction-diffusion benchmark with boundary layers at both ends.
 *
 * # Safety
 * `out` must be a valid pointer to an uninitialized handle slot.
 */
enum EqmStatus eqm_problem_reaction_diffusion(double epsilon, struct EqmProblem **out);

/**
 * Convection-dominated benchmark with a boundary layer at x = 1.
 *
 * # Safety
 * `out` must be a valid pointer to an uninitialized handle slot.
 */
enum EqmStatus eqm_problem_convection_dominated(double epsilon, struct EqmProblem **out);

/**
 * Singular-coefficient benchmark with manufactured solution.
 *
 * # Safety
 * `out` must be a valid pointer to an uninitialized handle slot.
 */
enum EqmStatus eqm_problem_babuska_rheinboldt(double p,
                                              double q,
                                              double r,
                                              double alpha,
                                              struct EqmProblem **out);

/**
 * # Safety
 * `problem` must come from an `eqm_problem_*` constructor; passing it
 * again afterwards is undefined.
 */
void eqm_problem_free(struct EqmProblem *problem);

/**
 * Uniform mesh with `n` cells.
 *
 * # Safety
 * `out` must be a valid pointer to an uninitialized handle slot.
 */
enum EqmStatus eqm_mesh_uniform(size_t n, struct EqmMesh **out);

/**
 * Mesh from an explicit node vector (must start at 0, end at 1, increase).
 *
 * # Safety
 * `nodes` must point to `len` readable doubles; `out` as above.
 */
enum EqmStatus eqm_mesh_from_nodes(const double *nodes, size_t len, struct EqmMesh **out);

/**
 * Number of nodes (cells + 1); 0 for a null handle.
 *
 * # Safety
 * `mesh` must be a live mesh handle or null.
 */
size_t eqm_mesh_node_count(const struct EqmMesh *mesh);

/**
 * Copy the node coordinates into `buf` (length `len` >= node count).
 *
 * # Safety
 * `mesh` must be live; `buf` must point to `len` writable doubles.
 */
enum EqmStatus eqm_mesh_copy_nodes(const struct EqmMesh *mesh, double *buf, size_t len);

/**
 * # Safety
 * `mesh` must come from this library; passing it again afterwards is
 * undefined.
 */
void eqm_mesh_free(struct EqmMesh *mesh);

/**
 * Equidistribute a per-cell density over `mesh` (one value per cell).
 *
 * # Safety
 * `mesh` must be live; `rho` must point to `len` readable doubles; `out`
 * as above.
 */
enum EqmStatus eqm_equidistribute(const struct EqmMesh *mesh,
                                  const double *rho,
                                  size_t len,
                                  struct EqmMesh **out);

/**
 * Equidistribution quality per cell, written to `q_out` (length `len`).
 *
 * # Safety
 * `mesh` must be live; `rho` and `q_out` must each point to `len` doubles.
 */
enum EqmStatus eqm_quality_measure(const struct EqmMesh *mesh,
                                   const double *rho,
                                   size_t len,
                                   double *q_out);

/**
 * Solve the problem on a fixed mesh.
 *
 * # Safety
 * `problem` and `mesh` must be live handles; `out` as above.
 */
enum EqmStatus eqm_solve(const struct EqmProblem *problem,
                         const struct EqmMesh *mesh,
                         struct EqmSolution **out);

/**
 * Evaluate value and derivative of a solution at `x` in [0, 1].
 *
 * # Safety
 * `solution` must be live; `value` and `derivative` must be writable or
 * null (null skips that output).
 */
enum EqmStatus eqm_solution_evaluate(const struct EqmSolution *solution,
                                     double x,
                                     double *value,
                                     double *derivative);

/**
 * Number of nodal values; 0 for a null handle.
 *
 * # Safety
 * `solution` must be a live solution handle or null.
 */
size_t eqm_solution_node_count(const struct EqmSolution *solution);

/**
 * Copy nodal values into `buf` (length `len` >= node count).
 *
 * # Safety
 * `solution` must be live; `buf` must point to `len` writable doubles.
 */
enum EqmStatus eqm_solution_copy_values(const struct EqmSolution *solution,
                                        double *buf,
                                        size_t len);

/**
 * # Safety
 * `solution` must come from this library; passing it again afterwards is
 * undefined.
 */
void eqm_solution_free(struct EqmSolution *solution);

/**
 * Default iteration controls (kappa 1.01, tol 1e-8, cap 1000).
 */
struct EqmAdaptOptions eqm_adapt_options_default(void);

/**
 * Run the adaptive iteration from a uniform mesh with `n` cells.
 * A null `options` uses the defaults.
 *
 * # Safety
 * `problem` must be live; `options` must be null or point to valid
 * options; `out` as above.
 */
enum EqmStatus eqm_solve_adaptive(const struct EqmProblem *problem,
                                  size_t n,
                                  const struct EqmAdaptOptions *options,
                                  struct EqmResult **out);

/**
 * Number of mesh updates applied before acceptance.
 *
 * # Safety
 * `result` must be a live result handle or null.
 */
size_t eqm_result_iterations(const struct EqmResult *result);

/**
 * Which stopping criterion fired.
 *
 * # Safety
 * `result` must be a live result handle (null reports MaxIter).
 */
enum EqmConvergedBy eqm_result_converged_by(const struct EqmResult *result);

/**
 * Copy of the final mesh.
 *
 * # Safety
 * `result` must be live; `out` as above.
 */
enum EqmStatus eqm_result_mesh(const struct EqmResult *result, struct EqmMesh **out);

/**
 * Copy of the final solution.
 *
 * # Safety
 * `result` must be live; `out` as above.
 */
enum EqmStatus eqm_result_solution(const struct EqmResult *result, struct EqmSolution **out);

/**
 * Largest equidistribution quality value on the final mesh.
 *
 * # Safety
 * `result` must be a live result handle or null (returns NaN).
 */
double eqm_result_max_quality(const struct EqmResult *result);

/**
 * Normalization sigma_h of the final adaptation function.
 *
 * # Safety
 * `result` must be a live result handle or null (returns NaN).
 */
double eqm_result_sigma(const struct EqmResult *result);

/**
 * Intensity alpha_h of the final iterate.
 *
 * # Safety
 * `result` must be a live result handle or null (returns NaN).
 */
double eqm_result_alpha(const struct EqmResult *result);

/**
 * H1 seminorm error against the exact solution (EQM_STATUS_UNSUPPORTED
 * when the problem has none).
 *
 * # Safety
 * `result` must be live; `out` must be writable.
 */
enum EqmStatus eqm_result_h1_error(const struct EqmResult *result, double *out);

/**
 * Regularized estimator eta~ of the final iterate.
 *
 * # Safety
 * `result` must be live; `out` must be writable.
 */
enum EqmStatus eqm_result_eta_tilde(const struct EqmResult *result, double *out);

/**
 * # Safety
 * `result` must come from this library; passing it again afterwards is
 * undefined.
 */
void eqm_result_free(struct EqmResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUIMESH_H */
