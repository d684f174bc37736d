/* C interface to the rdgof goodness-of-fit library. */

#ifndef RDGOF_H
#define RDGOF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API function.
 */
typedef enum RdgofStatus {
  RDGOF_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  RDGOF_STATUS_NULL_POINTER = 1,
  /**
   * An argument failed validation; see the last error message.
   */
  RDGOF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The solver hit its iteration limit.
   */
  RDGOF_STATUS_NO_CONVERGENCE = 3,
  /**
   * A numeric failure inside an otherwise valid computation.
   */
  RDGOF_STATUS_NUMERIC = 4,
} RdgofStatus;

/**
 * Null model selector for [`rdgof_calibrate`].
 */
typedef enum RdgofModel {
  /**
   * Uniform on a finite alphabet; `parameter` is the Hamming mixing
   * weight and `alphabet_size` is required.
   */
  RDGOF_MODEL_UNIFORM_DISCRETE = 0,
  /**
   * Standard normal; `parameter` is the Gaussian shrinkage factor.
   */
  RDGOF_MODEL_STANDARD_NORMAL = 1,
  /**
   * Uniform on the circle; `parameter` is the von Mises concentration.
   */
  RDGOF_MODEL_UNIFORM_CIRCLE = 2,
} RdgofModel;

/**
 * Solved rate-distortion problem: optimal channel plus its operating point.
 */
typedef struct RdgofChannel RdgofChannel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread, or null if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *rdgof_last_error_message(void);

/**
 * Hamming-kernel statistic for categorical data against the uniform null.
 *
 * `labels` holds `n` values in `[0, alphabet_size)`.
 *
 * # Safety
 * `labels` must point to `n` readable elements and `out` must be writable.
 */
enum RdgofStatus rdgof_hamming_statistic(const size_t *labels,
                                         size_t n,
                                         size_t alphabet_size,
                                         double alpha,
                                         double *out);

/**
 * Gaussian-kernel statistic for real data against the standard normal null.
 *
 * Pass `grid_points = 0` for the default quadrature configuration.
 *
 * # Safety
 * `values` must point to `n` readable elements and `out` must be writable.
 */
enum RdgofStatus rdgof_gaussian_statistic(const double *values,
                                          size_t n,
                                          double alpha,
                                          size_t grid_points,
                                          double *out);

/**
 * Von Mises-kernel statistic for angles against the circular uniform null.
 *
 * Pass `grid_points = 0` for the default quadrature configuration.
 *
 * # Safety
 * `angles` must point to `n` readable elements and `out` must be writable.
 */
enum RdgofStatus rdgof_circular_statistic(const double *angles,
                                          size_t n,
                                          double kappa,
                                          size_t grid_points,
                                          double *out);

/**
 * Solves at a fixed slope `beta`. `distortion` is a row-major
 * `alphabet_size`-square matrix, or null for Hamming distortion.
 * On success `*out` owns a handle that must be released with
 * [`rdgof_channel_free`].
 *
 * # Safety
 * `source` must point to `alphabet_size` readable elements, `distortion` to
 * `alphabet_size`² elements or be null, and `out` must be writable.
 */
enum RdgofStatus rdgof_channel_solve_slope(const double *source,
                                           size_t alphabet_size,
                                           const double *distortion,
                                           double beta,
                                           struct RdgofChannel **out);

/**
 * Solves for a target distortion `d0`; otherwise as
 * [`rdgof_channel_solve_slope`].
 *
 * # Safety
 * Same contract as [`rdgof_channel_solve_slope`].
 */
enum RdgofStatus rdgof_channel_solve_distortion(const double *source,
                                                size_t alphabet_size,
                                                const double *distortion,
                                                double d0,
                                                struct RdgofChannel **out);

/**
 * Rate (nats), distortion and slope of a solved channel.
 *
 * # Safety
 * `handle` must come from a solve call and not have been freed; out-pointers
 * must be writable or null (null fields are skipped).
 */
enum RdgofStatus rdgof_channel_point(const struct RdgofChannel *handle,
                                     double *rate,
                                     double *distortion,
                                     double *slope);

/**
 * Number of source symbols of a solved channel.
 *
 * # Safety
 * `handle` must come from a solve call and not have been freed.
 */
size_t rdgof_channel_rows(const struct RdgofChannel *handle);

/**
 * Number of reproduction symbols of a solved channel.
 *
 * # Safety
 * `handle` must come from a solve call and not have been freed.
 */
size_t rdgof_channel_cols(const struct RdgofChannel *handle);

/**
 * One transition probability of a solved channel.
 *
 * # Safety
 * `handle` must come from a solve call and not have been freed; `out` must
 * be writable.
 */
enum RdgofStatus rdgof_channel_entry(const struct RdgofChannel *handle,
                                     size_t row,
                                     size_t col,
                                     double *out);

/**
 * Releases a channel handle. Null is a no-op.
 *
 * # Safety
 * `handle` must come from a solve call and must not be used afterwards.
 */
void rdgof_channel_free(struct RdgofChannel *handle);

/**
 * Monte Carlo critical value of the matching rate-distortion statistic under
 * the selected null, reproducible for a fixed `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RdgofStatus rdgof_calibrate(enum RdgofModel model,
                                 size_t alphabet_size,
                                 double parameter,
                                 size_t sample_size,
                                 size_t replications,
                                 uint64_t seed,
                                 double significance,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDGOF_H */
