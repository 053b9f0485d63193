#ifndef KORTEWEG_H
#define KORTEWEG_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  KW_STATUS_OK = 0,
  KW_STATUS_NULL_POINTER = 1,
  KW_STATUS_INVALID_ARGUMENT = 2,
  KW_STATUS_CONFIG = 3,
  KW_STATUS_VACUUM = 4,
  KW_STATUS_NON_FINITE = 5,
  KW_STATUS_STEP_REJECTED = 6,
  KW_STATUS_IO = 7,
  KW_STATUS_CHECK_FAILED = 8,
  KW_STATUS_BUFFER_TOO_SMALL = 9,
  KW_STATUS_PANIC = 10,
  KW_STATUS_INTERNAL = 11,
} KwStatus;

typedef enum {
  KW_REGIME_COMPLEX_PAIR = 0,
  KW_REGIME_DOUBLE_ROOT = 1,
  KW_REGIME_REAL_PAIR = 2,
} KwRegime;

/**
 * A running simulation built from a manifest.
 */
typedef struct KwSimulation KwSimulation;

/**
 * Coefficients of the linearised system.
 */
typedef struct {
  double rho_star;
  double mu;
  double lambda;
  double kappa;
  double gamma;
} KwParams;

/**
 * `λ± = re ± i im` of one Fourier mode.
 */
typedef struct {
  double plus_re;
  double plus_im;
  double minus_re;
  double minus_im;
} KwEigenvalues;

typedef struct {
  double time;
  /**
   * Mean of `ρ − ρ*`.
   */
  double mass;
  double l2_a;
  double l2_m;
  double min_rho;
  double max_rho;
} KwDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *kw_last_error(void);

/**
 * Library version as a static string.
 */
const char *kw_version(void);

/**
 * Closed-form eigenvalues of the symbol at `|ξ| = xi`.
 *
 * # Safety
 * `p` and `out` must be valid pointers or null.
 */
KwStatus kw_eigenvalues(const KwParams *p, double xi, KwEigenvalues *out);

/**
 * Regime of the mode `|ξ| = xi`.
 *
 * # Safety
 * `p` and `out` must be valid pointers or null.
 */
KwStatus kw_classify_regime(const KwParams *p, double xi, KwRegime *out);

/**
 * Builds a simulation from a manifest given as text (`is_json` selects the
 * format). Grid, model, initial data, scheme and form are taken from it.
 *
 * # Safety
 * `manifest` must be a NUL-terminated string; `out` a valid pointer.
 */
KwStatus kw_simulation_new(const char *manifest, bool is_json, KwSimulation **out);

/**
 * Releases a simulation; null is ignored.
 *
 * # Safety
 * `sim` must come from [`kw_simulation_new`] and not be used afterwards.
 */
void kw_simulation_free(KwSimulation *sim);

/**
 * Advances to `t_end` with steps of at most `dt`. On error the state is
 * left unchanged.
 *
 * # Safety
 * `sim` must be a live handle or null.
 */
KwStatus kw_simulation_advance(KwSimulation *sim, double t_end, double dt);

/**
 * # Safety
 * `sim` must be a live handle; `out` a valid pointer.
 */
KwStatus kw_simulation_diagnostics(KwSimulation *sim, KwDiagnostics *out);

/**
 * Number of grid points; the size `kw_simulation_density` needs.
 *
 * # Safety
 * `sim` must be a live handle; `out` a valid pointer.
 */
KwStatus kw_simulation_len(KwSimulation *sim, size_t *out);

/**
 * Writes the density `ρ = ρ* + a` on the grid, row-major, into `buf`.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must hold `len` doubles.
 */
KwStatus kw_simulation_density(KwSimulation *sim, double *buf, size_t len);

/**
 * Runs a manifest file into `out_dir`; `passed` receives whether every
 * check passed. A run whose checks fail still returns `Ok`.
 *
 * # Safety
 * `path` and `out_dir` must be NUL-terminated strings; `passed` a valid pointer.
 */
KwStatus kw_run_manifest(const char *path, const char *out_dir, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KORTEWEG_H */
