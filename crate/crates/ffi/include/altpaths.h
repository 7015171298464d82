#ifndef ALTPATHS_H
#define ALTPATHS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AltpathsStatus {
  ALTPATHS_STATUS_OK = 0,
  ALTPATHS_STATUS_NULL_POINTER = 1,
  ALTPATHS_STATUS_INVALID_UTF8 = 2,
  ALTPATHS_STATUS_PARSE_ERROR = 3,
  ALTPATHS_STATUS_IO_ERROR = 4,
  ALTPATHS_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The exhaustive oracle declined an instance with too many paths.
   */
  ALTPATHS_STATUS_REFUSED = 6,
  ALTPATHS_STATUS_PANIC = 7,
} AltpathsStatus;

typedef enum AltpathsMethod {
  ALTPATHS_METHOD_BENDERS = 0,
  ALTPATHS_METHOD_RAPCP = 1,
  ALTPATHS_METHOD_RAPCPA2 = 2,
  ALTPATHS_METHOD_ORACLE = 3,
} AltpathsMethod;

typedef enum AltpathsSolveStatus {
  ALTPATHS_SOLVE_STATUS_OPTIMAL = 0,
  /**
   * A time or node limit stopped the search; the best path set is kept.
   */
  ALTPATHS_SOLVE_STATUS_LIMIT_REACHED = 1,
  ALTPATHS_SOLVE_STATUS_INFEASIBLE = 2,
} AltpathsSolveStatus;

/**
 * A validated instance.
 */
typedef struct AltpathsInstance AltpathsInstance;

/**
 * Result of one solve, with paths stored as arc ids.
 */
typedef struct AltpathsSolution AltpathsSolution;

typedef struct AltpathsSolveOptions {
  double time_limit_s;
  /**
   * 0 means no node limit.
   */
  uint64_t node_limit;
  size_t oracle_cap;
  /**
   * Filter relaxation rounds by `obj_a * obj_b` instead of `obj_b`.
   */
  bool product_filter;
  bool warm_start;
} AltpathsSolveOptions;

typedef struct AltpathsKpis {
  int64_t cost;
  size_t min_surviving_paths;
  int64_t min_max_flow;
  size_t path_disjointness;
} AltpathsKpis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *altpaths_last_error(void);

/**
 * Parses an instance from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AltpathsStatus altpaths_instance_from_json(const char *json, struct AltpathsInstance **out);

/**
 * Loads an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AltpathsStatus altpaths_instance_load(const char *path, struct AltpathsInstance **out);

/**
 * # Safety
 * `instance` must be null or a handle from this library, not yet freed.
 */
void altpaths_instance_free(struct AltpathsInstance *instance);

/**
 * Replaces the path budget.
 *
 * # Safety
 * `instance` must be a live handle.
 */
enum AltpathsStatus altpaths_instance_set_k(struct AltpathsInstance *instance, size_t k);

/**
 * # Safety
 * `instance` must be a live handle.
 */
size_t altpaths_instance_k(const struct AltpathsInstance *instance);

struct AltpathsSolveOptions altpaths_solve_options_default(void);

/**
 * Solves `instance` with `method`. `options` may be null for defaults.
 *
 * # Safety
 * `instance` must be a live handle, `options` null or valid, `out` valid.
 */
enum AltpathsStatus altpaths_solve(const struct AltpathsInstance *instance,
                                   enum AltpathsMethod method,
                                   const struct AltpathsSolveOptions *options,
                                   struct AltpathsSolution **out);

/**
 * # Safety
 * `solution` must be null or a handle from this library, not yet freed.
 */
void altpaths_solution_free(struct AltpathsSolution *solution);

/**
 * # Safety
 * `solution` must be a live handle.
 */
enum AltpathsSolveStatus altpaths_solution_status(const struct AltpathsSolution *solution);

/**
 * Worst-case flow and total cost. Fails with `InvalidArgument` for an
 * infeasible result.
 *
 * # Safety
 * `solution` must be a live handle; `z` and `cost` valid pointers.
 */
enum AltpathsStatus altpaths_solution_objective(const struct AltpathsSolution *solution,
                                                int64_t *z,
                                                int64_t *cost);

/**
 * Number of paths (0 when infeasible).
 *
 * # Safety
 * `solution` must be a live handle.
 */
size_t altpaths_solution_path_count(const struct AltpathsSolution *solution);

/**
 * Borrows path `index` as an array of arc ids owned by the solution.
 *
 * # Safety
 * `solution` must be a live handle; `arcs` and `len` valid pointers. The
 * array is valid until the solution is freed.
 */
enum AltpathsStatus altpaths_solution_path(const struct AltpathsSolution *solution,
                                           size_t index,
                                           const uint32_t **arcs,
                                           size_t *len);

/**
 * Quality indicators of the returned paths.
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum AltpathsStatus altpaths_solution_kpis(const struct AltpathsSolution *solution,
                                           struct AltpathsKpis *out);

/**
 * The solution as JSON. Release the string with [`altpaths_string_free`].
 *
 * # Safety
 * `solution` must be a live handle and `out` a valid pointer.
 */
enum AltpathsStatus altpaths_solution_to_json(const struct AltpathsSolution *solution, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void altpaths_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALTPATHS_H */
