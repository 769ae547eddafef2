#ifndef BLOODFLOW_H
#define BLOODFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BfMode {
  BF_MODE_WELL_BALANCED = 0,
  BF_MODE_NON_WELL_BALANCED = 1,
} BfMode;

typedef enum BfStatus {
  BF_STATUS_OK = 0,
  BF_STATUS_NULL_POINTER = 1,
  BF_STATUS_INVALID_ARGUMENT = 2,
  BF_STATUS_CONFIG = 3,
  BF_STATUS_STATE = 4,
  BF_STATUS_BLOW_UP = 5,
  BF_STATUS_IO = 6,
  BF_STATUS_BUFFER_TOO_SMALL = 7,
  BF_STATUS_INTERNAL = 8,
  BF_STATUS_PANIC = 9,
} BfStatus;

/**
 * Opaque solver handle: a benchmark case set up on a grid, plus its current
 * state and time.
 */
typedef struct BfSolver BfSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a solver for the named benchmark on `n_cells` cells at `t = 0`.
 * `cf` is the friction coefficient of the wave-damping case and ignored
 * otherwise.
 *
 * # Safety
 * `case_name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BfStatus bf_solver_new(const char *case_name,
                            size_t n_cells,
                            enum BfMode mode,
                            double cf,
                            struct BfSolver **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from [`bf_solver_new`] and not be used afterwards.
 */
void bf_solver_free(struct BfSolver *handle);

/**
 * Advances the solution to `t_end` (no-op if already there). On error the
 * handle keeps the state from before the call.
 *
 * # Safety
 * `handle` must be a live handle.
 */
enum BfStatus bf_solver_advance_to(struct BfSolver *handle, double t_end);

/**
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum BfStatus bf_solver_time(const struct BfSolver *handle, double *out);

/**
 * Number of time steps taken so far.
 *
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum BfStatus bf_solver_steps(const struct BfSolver *handle, uint64_t *out);

/**
 * # Safety
 * `handle` must be a live handle and `out` a valid pointer.
 */
enum BfStatus bf_solver_n_cells(const struct BfSolver *handle, size_t *out);

/**
 * Copies the interior areas and discharges into `a` and `q`, each of
 * length at least `n_cells`.
 *
 * # Safety
 * `a` and `q` must point to `len` writable doubles.
 */
enum BfStatus bf_solver_copy_state(const struct BfSolver *handle, double *a, double *q, size_t len);

/**
 * Copies the node coordinates.
 *
 * # Safety
 * `x` must point to `len` writable doubles.
 */
enum BfStatus bf_solver_copy_x(const struct BfSolver *handle, double *x, size_t len);

/**
 * Copies the rest areas `A0` at the nodes.
 *
 * # Safety
 * `a0` must point to `len` writable doubles.
 */
enum BfStatus bf_solver_copy_rest_area(const struct BfSolver *handle, double *a0, size_t len);

/**
 * Writes the last error message of this thread, NUL-terminated and
 * truncated to fit, into `buf`. Returns the full message length without
 * the terminator.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null with `len == 0`.
 */
size_t bf_last_error(char *buf, size_t len);

/**
 * Library version, a static NUL-terminated string.
 */
const char *bf_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOODFLOW_H */
