#ifndef EIT_QNLSE_H
#define EIT_QNLSE_H

/* Generated by cbindgen from eit-qnlse-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum EitqStatus {
  EITQ_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  EITQ_STATUS_NULL_ARGUMENT = 1,
  /**
   * Invalid input: bad parameter values, malformed config, unmet precondition.
   */
  EITQ_STATUS_PARAMETER_ERROR = 2,
  /**
   * Numeric failure: pole, singular system, regime violation, non-convergence.
   */
  EITQ_STATUS_NUMERIC_ERROR = 3,
  /**
   * Filesystem failure.
   */
  EITQ_STATUS_IO_ERROR = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  EITQ_STATUS_UTF8_ERROR = 5,
  /**
   * Internal panic (a bug; details in the last error message).
   */
  EITQ_STATUS_INTERNAL_PANIC = 6,
} EitqStatus;

/**
 * Opaque handle around a validated parameter set.
 */
typedef struct EitqParams EitqParams;

/**
 * Envelope-equation coefficient set (plain data, returned by value).
 */
typedef struct EitqNlseCoefficients {
  double k0_re;
  double k0_im;
  /**
   * Group velocity, cm/s.
   */
  double vg;
  /**
   * Re K2, cm^-1 s^2.
   */
  double k2;
  /**
   * Re W, cm^-1.
   */
  double w;
  /**
   * 1/(2 k_p), cm.
   */
  double diffraction;
} EitqNlseCoefficients;

/**
 * Derived soliton quantities.
 */
typedef struct EitqSolitonDerived {
  double b0;
  /**
   * Width unit, cm.
   */
  double l0;
  /**
   * Soliton velocity, cm/s.
   */
  double vs;
  /**
   * Group velocity, cm/s.
   */
  double vg;
} EitqSolitonDerived;

/**
 * Two-photon bound-state summary.
 */
typedef struct EitqBoundState {
  double m0;
  double a0;
  double zeta0;
  double e_com;
  double e_binding;
  double e_total;
} EitqBoundState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the underlying library (static, do not free).
 */
const char *eitq_version(void);

/**
 * Copy the last error message on this thread into `buf` (truncated to
 * `len` − 1 bytes, always NUL-terminated). Returns the full message length.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
uintptr_t eitq_last_error_message(char *buf, uintptr_t len);

/**
 * Fresh handle with the Rb-87 preset (couplings unset until calibrated).
 * Free with [`eitq_params_free`].
 */
struct EitqParams *eitq_params_rb87(void);

/**
 * Load a config file into a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum EitqStatus eitq_params_load(const char *path, struct EitqParams **out);

/**
 * Save the handle's parameters to a config file.
 *
 * # Safety
 * `params` must be a live handle from this library; `path` NUL-terminated.
 */
enum EitqStatus eitq_params_save(const struct EitqParams *params, const char *path);

/**
 * Destroy a handle. Null is a no-op.
 *
 * # Safety
 * `params` must have been returned by this library and not freed before.
 */
void eitq_params_free(struct EitqParams *params);

/**
 * Calibrate the handle in place against reference (K2, W) values.
 *
 * # Safety
 * `params` must be a live handle from this library.
 */
enum EitqStatus eitq_calibrate(struct EitqParams *params, double k2_target, double w_target);

/**
 * Evaluate K(omega); writes real and imaginary parts in cm^-1.
 *
 * # Safety
 * `params` must be a live handle; `k_re`, `k_im` must be valid pointers.
 */
enum EitqStatus eitq_dispersion_at(const struct EitqParams *params,
                                   double omega,
                                   double *k_re,
                                   double *k_im);

/**
 * Full envelope-equation coefficient set (requires a calibrated handle).
 *
 * # Safety
 * `params` must be a live handle; `out` must be a valid pointer.
 */
enum EitqStatus eitq_nlse_coefficients(const struct EitqParams *params,
                                       struct EitqNlseCoefficients *out);

/**
 * Derived bright-soliton quantities for (eta0, xi0, t0).
 *
 * # Safety
 * `params` must be a live handle; `out` must be a valid pointer.
 */
enum EitqStatus eitq_soliton_derived(const struct EitqParams *params,
                                     double eta0,
                                     double xi0,
                                     double t0,
                                     struct EitqSolitonDerived *out);

/**
 * Two-photon bound-state summary for COM momentum `p0` with the handle's
 * cell length.
 *
 * # Safety
 * `params` must be a live handle; `out` must be a valid pointer.
 */
enum EitqStatus eitq_bound_state(const struct EitqParams *params,
                                 double p0,
                                 struct EitqBoundState *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EIT_QNLSE_H */
