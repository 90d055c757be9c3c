#ifndef ORBIT_SMOOTH_H
#define ORBIT_SMOOTH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum OsStatus {
  OS_STATUS_OK = 0,
  OS_STATUS_NULL_POINTER = 1,
  OS_STATUS_INVALID_ARGUMENT = 2,
  OS_STATUS_DIMENSION_MISMATCH = 3,
  OS_STATUS_NOT_FINITE = 4,
  OS_STATUS_CONFIGURATION = 5,
  OS_STATUS_INTERNAL = 6,
  OS_STATUS_PANIC = 7,
} OsStatus;

/**
 * A smoothing chain built on a group.
 */
typedef struct OsChain OsChain;

/**
 * A finite reflection group with its chamber.
 */
typedef struct OsGroup OsGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *os_last_error_message(void);

/**
 * Build a preset group by name, for example `"B3"` or `"I2(5)"`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum OsStatus os_group_preset(const char *name, struct OsGroup **out);

/**
 * Generate the group of the reflections with the given mirror normals,
 * stored row-major as `count` rows of `dim` entries.
 *
 * # Safety
 * `normals` must hold `count * dim` values and `out` must be valid.
 */
enum OsStatus os_group_from_normals(const double *normals,
                                    size_t count,
                                    size_t dim,
                                    size_t cap,
                                    struct OsGroup **out);

/**
 * # Safety
 * `group` must come from a constructor here and not be used afterwards.
 */
void os_group_free(struct OsGroup *group);

/**
 * # Safety
 * `group` must be a live handle; `order` and `dim` may be null.
 */
enum OsStatus os_group_order(const struct OsGroup *group, size_t *order, size_t *dim);

/**
 * Fold `point` into the chamber. `image` receives `dim` values; `steps`
 * (may be null) the number of reflections applied.
 *
 * # Safety
 * Both buffers must hold `dim` values.
 */
enum OsStatus os_group_fold(const struct OsGroup *group,
                            const double *point,
                            size_t dim,
                            double *image,
                            size_t *steps);

/**
 * Stratum level of `point` and the number of mirrors through it.
 *
 * # Safety
 * `point` must hold `dim` values; `level` and `wall_count` may be null.
 */
enum OsStatus os_group_classify(const struct OsGroup *group,
                                const double *point,
                                size_t dim,
                                double tol,
                                size_t *level,
                                size_t *wall_count);

/**
 * Chain with the default profile and tube parameters for `group`.
 *
 * # Safety
 * `group` must be a live handle; it is copied and may be freed afterwards.
 */
enum OsStatus os_chain_new(const struct OsGroup *group, struct OsChain **out);

/**
 * # Safety
 * `chain` must come from [`os_chain_new`] and not be used afterwards.
 */
void os_chain_free(struct OsChain *chain);

/**
 * The invariant map `H` at `point`.
 *
 * # Safety
 * `point` and `out` must hold `dim` values.
 */
enum OsStatus os_chain_apply_h(const struct OsChain *chain,
                               const double *point,
                               size_t dim,
                               double *out);

/**
 * The chamber map `G`; `point` must lie in the closed chamber.
 *
 * # Safety
 * `point` and `out` must hold `dim` values.
 */
enum OsStatus os_chain_apply_g(const struct OsChain *chain,
                               const double *point,
                               size_t dim,
                               double *out);

/**
 * Check that the tubes of the chain are disjoint, sampling
 * `samples_per_face` points of every face.
 *
 * # Safety
 * `chain` must be a live handle.
 */
enum OsStatus os_chain_validate(const struct OsChain *chain,
                                size_t samples_per_face,
                                uint64_t seed);

/**
 * Derivative of order `order` (0 to 4) of the default profile `h` at `t`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OsStatus os_eval_h(double t, uint32_t order, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBIT_SMOOTH_H */
