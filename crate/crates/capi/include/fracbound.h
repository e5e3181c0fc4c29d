#ifndef FRACBOUND_H
#define FRACBOUND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum FbStatus {
  FbStatus_Ok = 0,
  FbStatus_NullPointer = 1,
  FbStatus_InvalidArgument = 2,
  FbStatus_ComputeError = 3,
} FbStatus;

/**
 * Opaque uniform grid over `[-L, L)^d`.
 */
typedef struct FbGrid FbGrid;

/**
 * Opaque nonnegative potential sampled on a grid.
 */
typedef struct FbPotential FbPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *fb_last_error_message(void);

/**
 * Create a grid; `d` is 1 or 2, `n` the (even) number of points per axis.
 *
 * # Safety
 * `out` must be a valid pointer to writable memory for one pointer.
 */
enum FbStatus fb_grid_new(uint32_t d, double l, uint32_t n, struct FbGrid **out);

/**
 * # Safety
 * `grid` must be a pointer returned by `fb_grid_new`, not yet freed.
 */
void fb_grid_free(struct FbGrid *grid);

/**
 * Square well `v0 * 1_{|x| <= a}`.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` writable.
 */
enum FbStatus fb_potential_well(const struct FbGrid *grid,
                                double v0,
                                double a,
                                struct FbPotential **out);

/**
 * Gaussian `v0 * exp(-|x|^2 / w^2)`.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` writable.
 */
enum FbStatus fb_potential_gaussian(const struct FbGrid *grid,
                                    double v0,
                                    double w,
                                    struct FbPotential **out);

/**
 * Smooth compactly supported bump of amplitude `v0` and radius `a`.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` writable.
 */
enum FbStatus fb_potential_bump(const struct FbGrid *grid,
                                double v0,
                                double a,
                                struct FbPotential **out);

/**
 * Power tail `v0 * (core^2 + |x|^2)^{-beta/2}`.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` writable.
 */
enum FbStatus fb_potential_power(const struct FbGrid *grid,
                                 double v0,
                                 double beta,
                                 double core,
                                 struct FbPotential **out);

/**
 * Load samples written in the plain-text format (`# d L N` header, one
 * value per line).
 *
 * # Safety
 * `grid` must be a live handle, `path` a NUL-terminated string, `out`
 * writable.
 */
enum FbStatus fb_potential_load(const struct FbGrid *grid,
                                const char *path,
                                struct FbPotential **out);

/**
 * Multiply a potential by `lambda >= 0`, producing a new handle.
 *
 * # Safety
 * `pot` must be a live potential handle and `out` writable.
 */
enum FbStatus fb_potential_scale(const struct FbPotential *pot,
                                 double lambda,
                                 struct FbPotential **out);

/**
 * # Safety
 * `pot` must be a pointer returned by a potential constructor.
 */
void fb_potential_free(struct FbPotential *pot);

/**
 * Count eigenvalues of `(-Delta)^s - V` below `-tau` by the direct
 * Galerkin solve; `tau <= 0` selects the default threshold.
 *
 * # Safety
 * `pot` must be a live handle; `out_count` writable.
 */
enum FbStatus fb_count_negative(const struct FbPotential *pot,
                                double s,
                                double tau,
                                uint64_t *out_count);

/**
 * Birman-Schwinger plateau count along the default energy sweep.
 * `out_converged` reports whether the sweep tail stabilized.
 *
 * # Safety
 * `pot` must be a live handle; out-pointers writable.
 */
enum FbStatus fb_bs_plateau(const struct FbPotential *pot,
                            double s,
                            uint64_t *out_count,
                            bool *out_converged);

/**
 * Projected low-frequency trace at energy `e <= 0`.
 *
 * # Safety
 * `pot` must be a live handle; `out` writable.
 */
enum FbStatus fb_trace_low_projected(const struct FbPotential *pot,
                                     double s,
                                     double e,
                                     double *out);

/**
 * Weak `L^{1,infty}` quasinorm of the high-frequency Birman-Schwinger
 * part at energy `e <= 0`. At `s = d/2` the value is Nyquist-truncated
 * and `ximax_acknowledged` must be set.
 *
 * # Safety
 * `pot` must be a live handle; `out` writable.
 */
enum FbStatus fb_weak_norm_high(const struct FbPotential *pot,
                                double s,
                                double e,
                                bool ximax_acknowledged,
                                double *out);

/**
 * The critical-case oscillator-log norm of `v` at truncation order `m`.
 *
 * # Safety
 * `pot` must be a live handle; `out` writable.
 */
enum FbStatus fb_hermite_log_norm(const struct FbPotential *pot,
                                  double eps,
                                  uint32_t m,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACBOUND_H */
