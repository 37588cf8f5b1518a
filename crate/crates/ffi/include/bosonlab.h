#ifndef BOSONLAB_H
#define BOSONLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_PARAMETER = 2,
  BL_STATUS_CUTOFF_TOO_SMALL = 3,
  BL_STATUS_DIMENSION_OVERFLOW = 4,
  BL_STATUS_CUTOFF_HEADROOM_INSUFFICIENT = 5,
  BL_STATUS_CUTOFF_MISMATCH = 6,
  BL_STATUS_INVALID_STATE = 7,
  BL_STATUS_DEGENERATE_DENOMINATOR = 8,
  BL_STATUS_OUT_OF_RANGE = 9,
  BL_STATUS_PANIC = 99,
} BlStatus;

// Index reading of the two-mode bound.
typedef enum BlReading {
  BL_READING_PER_MODE = 0,
  BL_READING_PRINTED = 1,
} BlReading;

// Opaque Gaussian state (mean vector and covariance).
typedef struct BlGaussian BlGaussian;

// Opaque density matrix on a truncated Fock space.
typedef struct BlState BlState;

typedef struct BlPowerResult {
  double ns;
  double bandwidth;
  double omega0;
  double power_watts;
  double power_dbm;
  double photons_per_second;
  // 1 met, 0 violated, -1 when no threshold was given.
  int32_t constraint_met;
} BlPowerResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *bl_last_error(void);

// Library version as a static NUL-terminated string.
const char *bl_version(void);

// Coherent state `|re + i·im⟩` truncated to `dim` levels.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BlStatus bl_state_coherent(double re, double im, size_t dim, struct BlState **out);

// Number state `|n⟩⟨n|`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BlStatus bl_state_number(size_t n, size_t dim, struct BlState **out);

// Thermal state with mean photon number `mean`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BlStatus bl_state_thermal(double mean, size_t dim, struct BlState **out);

// Squeezed vacuum with squeezing parameter `r`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BlStatus bl_state_squeezed(double r, size_t dim, struct BlState **out);

// Two-mode squeezed vacuum with `ns` mean signal photons, `dim` levels per mode.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum BlStatus bl_state_qidc(double ns, size_t dim, struct BlState **out);

// `a ⊗ b`.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum BlStatus bl_state_tensor(const struct BlState *a,
                              const struct BlState *b,
                              struct BlState **out);

// Releases a state handle; null is ignored.
//
// # Safety
// `s` must be null or a handle from this library not yet freed.
void bl_state_free(struct BlState *s);

// Number of modes.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum BlStatus bl_state_modes(const struct BlState *s, size_t *out);

// Total Hilbert-space dimension.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum BlStatus bl_state_dim(const struct BlState *s, size_t *out);

// Real part of the trace.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum BlStatus bl_state_trace(const struct BlState *s, double *out);

// `⟨a†a⟩` on `mode`.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum BlStatus bl_state_mean_photon_number(const struct BlState *s, size_t mode, double *out);

// Copies the density matrix, column-major, as interleaved `(re, im)`
// pairs into `buf`, which must hold `2·dim²` doubles.
//
// # Safety
// `s` must be a live handle; `buf` must point to `len` writable doubles.
enum BlStatus bl_state_copy_matrix(const struct BlState *s, double *buf, size_t len);

// Loss with one transmittance per mode.
//
// # Safety
// `s` must be a live handle, `kappa` must point to `n` doubles, `out` writable.
enum BlStatus bl_apply_loss(const struct BlState *s,
                            const double *kappa,
                            size_t n,
                            struct BlState **out);

// Additive Gaussian noise with one variance per mode.
//
// # Safety
// `s` must be a live handle, `noise` must point to `n` doubles, `out` writable.
enum BlStatus bl_apply_agn(const struct BlState *s,
                           const double *noise,
                           size_t n,
                           struct BlState **out);

// `‖a − b‖₁` (range `[0, 2]`).
//
// # Safety
// `a`, `b` must be live handles and `out` writable.
enum BlStatus bl_trace_distance(const struct BlState *a, const struct BlState *b, double *out);

// `‖L_κ G_N ρ − G_{κN} L_κ ρ‖₁`.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum BlStatus bl_commutation_defect(const struct BlState *s,
                                    double kappa,
                                    double noise,
                                    double *out);

// `2√(N/(N+1))`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_bound_theorem2(double noise, double *out);

// `2(N₁ − N₂)/N₂` for `N₁ ≥ N₂`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_bound_theorem3(double n1, double n2, double *out);

// Two-mode bound; `na` and `nb` point to two doubles each.
//
// # Safety
// `na`, `nb` must point to two doubles; `out` must be writable.
enum BlStatus bl_bound_theorem4(const double *na,
                                const double *nb,
                                enum BlReading reading,
                                double *out);

// Multimode bound; `vacuous` is set to 1 when the value exceeds 2.
//
// # Safety
// `noise` must point to `n` doubles; `value` and `vacuous` must be writable.
enum BlStatus bl_bound_theorem5(const double *noise, size_t n, double *value, int32_t *vacuous);

// Two-mode squeezed vacuum covariance with `ns` mean signal photons.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_gaussian_qidc(double ns, struct BlGaussian **out);

// Single-mode squeezed vacuum.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_gaussian_squeezed(double r, struct BlGaussian **out);

// # Safety
// `g` must be null or a handle from this library not yet freed.
void bl_gaussian_free(struct BlGaussian *g);

// # Safety
// `g` must be a live handle, `kappa` must point to `n` doubles, `out` writable.
enum BlStatus bl_gaussian_apply_loss(const struct BlGaussian *g,
                                     const double *kappa,
                                     size_t n,
                                     struct BlGaussian **out);

// # Safety
// `g` must be a live handle, `noise` must point to `n` doubles, `out` writable.
enum BlStatus bl_gaussian_apply_agn(const struct BlGaussian *g,
                                    const double *noise,
                                    size_t n,
                                    struct BlGaussian **out);

// Classicality certificate: `is_classical` is 0 or 1, `min_eigenvalue` is
// the smallest eigenvalue of `cov − I/2`.
//
// # Safety
// `g` must be a live handle; both outputs must be writable.
enum BlStatus bl_gaussian_certificate(const struct BlGaussian *g,
                                      int32_t *is_classical,
                                      double *min_eigenvalue);

// Smallest noise scale along `direction` that makes `g` classical.
//
// # Safety
// `g` must be a live handle, `direction` must point to `n` doubles, `out` writable.
enum BlStatus bl_classicality_threshold(const struct BlGaussian *g,
                                        const double *direction,
                                        size_t n,
                                        double tol,
                                        double *out);

// `P = ħω₀ N_S W` at vacuum wavelength `wavelength` (m). Pass NaN for an
// absent `nmax` or `pmax`.
//
// # Safety
// `out` must be writable.
enum BlStatus bl_power_calc(double ns,
                            double wavelength,
                            double bandwidth,
                            double nmax,
                            double pmax,
                            struct BlPowerResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOSONLAB_H */
