#ifndef MGA_H
#define MGA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MgaStatus {
  MGA_STATUS_OK = 0,
  MGA_STATUS_NULL_POINTER = 1,
  MGA_STATUS_INVALID_ARGUMENT = 2,
  MGA_STATUS_IO = 3,
  MGA_STATUS_CONFIG = 4,
  /**
   * The plan or search produced no feasible trajectory.
   */
  MGA_STATUS_INFEASIBLE = 5,
  MGA_STATUS_OUT_OF_RANGE = 6,
  MGA_STATUS_NUMERICAL = 7,
  MGA_STATUS_PANIC = 8,
} MgaStatus;

/**
 * Outcome of one plan evaluation.
 */
typedef struct MgaEvaluation MgaEvaluation;

/**
 * A loaded case study.
 */
typedef struct MgaProblem MgaProblem;

/**
 * Result of one seeded search.
 */
typedef struct MgaSearchResult MgaSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library from the
 * same thread.
 */
const char *mga_last_error_message(void);

/**
 * Eccentric anomaly for mean anomaly `mean_anomaly` and eccentricity `e`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one double.
 */
enum MgaStatus mga_solve_kepler(double mean_anomaly, double e, double *out);

/**
 * Loads a case-study config (and the catalog it names).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must point to writable
 * memory for one pointer. On success `*out` owns a handle for
 * [`mga_problem_free`].
 */
enum MgaStatus mga_problem_load(const char *path, struct MgaProblem **out);

/**
 * # Safety
 * `problem` must be null or a handle from [`mga_problem_load`] not yet freed.
 */
void mga_problem_free(struct MgaProblem *problem);

/**
 * Number of legs; 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t mga_problem_n_legs(const struct MgaProblem *problem);

/**
 * Evaluates the plan coded by `s[0..len]` (1-based interleaved entries).
 *
 * # Safety
 * `problem` must be a live handle, `s` must point to `len` readable values
 * and `out` to writable memory for one pointer.
 */
enum MgaStatus mga_evaluate(const struct MgaProblem *problem,
                            const uint32_t *s,
                            size_t len,
                            struct MgaEvaluation **out);

/**
 * # Safety
 * `evaluation` must be null or a live handle.
 */
void mga_evaluation_free(struct MgaEvaluation *evaluation);

/**
 * 1 when the plan has at least one trajectory, else 0 (also for null).
 *
 * # Safety
 * `evaluation` must be null or a live handle.
 */
int32_t mga_evaluation_is_feasible(const struct MgaEvaluation *evaluation);

/**
 * Objective of the best trajectory.
 *
 * # Safety
 * `evaluation` must be a live handle and `out` writable.
 */
enum MgaStatus mga_evaluation_f_obj(const struct MgaEvaluation *evaluation, double *out);

/**
 * Arrival excess speed of the best trajectory, km/s.
 *
 * # Safety
 * `evaluation` must be a live handle and `out` writable.
 */
enum MgaStatus mga_evaluation_v_inf(const struct MgaEvaluation *evaluation, double *out);

/**
 * 1-based leg at which an infeasible plan died.
 *
 * # Safety
 * `evaluation` must be a live handle and `out` writable.
 */
enum MgaStatus mga_evaluation_failed_leg(const struct MgaEvaluation *evaluation, size_t *out);

/**
 * Number of trajectories in the plan's tree; 0 when infeasible or null.
 *
 * # Safety
 * `evaluation` must be null or a live handle.
 */
size_t mga_evaluation_n_trajectories(const struct MgaEvaluation *evaluation);

/**
 * Copies the leg durations (days) of the best trajectory into `buf`.
 * `*n_legs` receives the leg count; `MGA_STATUS_OUT_OF_RANGE` when `cap`
 * is smaller, in which case nothing is copied.
 *
 * # Safety
 * `buf` must have room for `cap` doubles; `evaluation` and `n_legs` must be
 * valid.
 */
enum MgaStatus mga_evaluation_leg_times(const struct MgaEvaluation *evaluation,
                                        double *buf,
                                        size_t cap,
                                        size_t *n_legs);

/**
 * Runs one search with the config's settings. `seed` replaces the config
 * seed; `max_evals` replaces the budget unless it is 0.
 *
 * # Safety
 * `problem` must be a live handle and `out` writable.
 */
enum MgaStatus mga_search(const struct MgaProblem *problem,
                          uint64_t seed,
                          size_t max_evals,
                          struct MgaSearchResult **out);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
void mga_search_free(struct MgaSearchResult *result);

/**
 * Evaluations spent; 0 for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t mga_search_n_eval(const struct MgaSearchResult *result);

/**
 * Feasible solutions found; 0 for null.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t mga_search_n_feasible(const struct MgaSearchResult *result);

/**
 * Entry `index` of the feasible list (0 is the best): its objective and
 * solution vector. `*len` receives the vector length; `MGA_STATUS_OUT_OF_RANGE`
 * when `index` is past the end or `cap` is too small.
 *
 * # Safety
 * `s_buf` must have room for `cap` values; the other pointers must be valid.
 */
enum MgaStatus mga_search_entry(const struct MgaSearchResult *result,
                                size_t index,
                                double *f_obj,
                                uint32_t *s_buf,
                                size_t cap,
                                size_t *len);

/**
 * Writes the sequence label of entry `index` (e.g. `EVVEJS`) as a
 * NUL-terminated string into `buf` of `cap` bytes.
 *
 * # Safety
 * `buf` must have room for `cap` bytes.
 */
enum MgaStatus mga_search_entry_sequence(const struct MgaSearchResult *result,
                                         size_t index,
                                         char *buf,
                                         size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MGA_H */
