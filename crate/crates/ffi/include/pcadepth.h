#ifndef PCADEPTH_H
#define PCADEPTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PcadepthStatus {
  PCADEPTH_STATUS_OK = 0,
  PCADEPTH_STATUS_VALIDATION = 1,
  PCADEPTH_STATUS_IO = 2,
  PCADEPTH_STATUS_NUMERICAL = 3,
  PCADEPTH_STATUS_NULL_POINTER = 4,
  PCADEPTH_STATUS_PANIC = 5,
} PcadepthStatus;

/**
 * Coefficient covariance scaling, see `CovarianceMode`.
 */
typedef enum PcadepthCovariance {
  PCADEPTH_COVARIANCE_UNSCALED = 0,
  PCADEPTH_COVARIANCE_SIGMA_SCALED = 1,
} PcadepthCovariance;

/**
 * Opaque handle to a loaded basis.
 */
typedef struct PcadepthBasis PcadepthBasis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *pcadepth_last_error(void);

/**
 * Loads a basis file. At most `max_components` leading components are
 * read; pass 0 for all of them.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PcadepthStatus pcadepth_basis_load(const char *path,
                                        size_t max_components,
                                        struct PcadepthBasis **out);

/**
 * Releases a handle from [`pcadepth_basis_load`]. NULL is ignored.
 *
 * # Safety
 * `basis` must come from [`pcadepth_basis_load`] and not be freed twice.
 */
void pcadepth_basis_free(struct PcadepthBasis *basis);

/**
 * Writes width, height and component count. Any output pointer may be NULL.
 *
 * # Safety
 * `basis` must be a live handle; non-null outputs must be writable.
 */
enum PcadepthStatus pcadepth_basis_dims(const struct PcadepthBasis *basis,
                                        size_t *width,
                                        size_t *height,
                                        size_t *components);

/**
 * MAP densification. `out_dense` receives `width * height` values;
 * `out_uncertainty`, when not NULL, receives the per-pixel uncertainty.
 * `count` may be 0, in which case the result is the basis mean.
 *
 * # Safety
 * Measurement arrays must hold `count` elements; output buffers must hold
 * `width * height` elements.
 */
enum PcadepthStatus pcadepth_densify(const struct PcadepthBasis *basis,
                                     const size_t *rows,
                                     const size_t *cols,
                                     const double *disparities,
                                     size_t count,
                                     double sigma_z,
                                     enum PcadepthCovariance covariance,
                                     bool clamp_negative,
                                     double *out_dense,
                                     double *out_uncertainty);

/**
 * Nearest-measurement interpolation into `out`, which must hold
 * `width * height` values. Needs at least one measurement.
 *
 * # Safety
 * Measurement arrays must hold `count` elements; `out` must hold
 * `width * height` elements.
 */
enum PcadepthStatus pcadepth_nearest(size_t width,
                                     size_t height,
                                     const size_t *rows,
                                     const size_t *cols,
                                     const double *disparities,
                                     size_t count,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCADEPTH_H */
