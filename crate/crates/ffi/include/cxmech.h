#ifndef CXMECH_H
#define CXMECH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CxStatus {
  CX_STATUS_OK = 0,
  CX_STATUS_NULL_POINTER = 1,
  CX_STATUS_INVALID_ARGUMENT = 2,
  CX_STATUS_PARSE = 3,
  CX_STATUS_PARAM = 4,
  CX_STATUS_EVAL = 5,
  CX_STATUS_INTEGRATION = 6,
  CX_STATUS_NONLINEAR = 7,
  CX_STATUS_SINGULAR = 8,
  CX_STATUS_PANIC = 9,
} CxStatus;

/**
 * Geometry curve selector.
 */
typedef enum CxCurve {
  CX_CURVE_Z = 0,
  CX_CURVE_ZDH = 1,
} CxCurve;

/**
 * Commutator selector, in report order.
 */
typedef enum CxBracket {
  CX_BRACKET_ZDAG_Z = 0,
  CX_BRACKET_Z_ZDOTDAG = 1,
  CX_BRACKET_ZDOTDAG_ZDDOT = 2,
  CX_BRACKET_ZDOT_ZDDOTDAG = 3,
} CxBracket;

typedef struct CxFlow CxFlow;

typedef struct CxParams CxParams;

typedef struct CxTrajectory CxTrajectory;

typedef struct CxSample {
  double t;
  double q;
  double p;
  double qdot;
  double pdot;
} CxSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cx_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full message length
 * excluding the terminator; 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t cx_last_error_message(char *buf, size_t len);

/**
 * New parameter set with `kappa0 = hbar = 1`.
 */
struct CxParams *cx_params_new(void);

/**
 * # Safety
 * `params` must be null or a handle from `cx_params_new` not yet freed.
 */
void cx_params_free(struct CxParams *params);

/**
 * # Safety
 * `params` must be a live handle and `name` a NUL-terminated string.
 */
enum CxStatus cx_params_set(struct CxParams *params, const char *name, double value);

/**
 * Value used during evaluation, including derived `omega`.
 *
 * # Safety
 * `params` must be a live handle, `name` NUL-terminated, `value` writable.
 */
enum CxStatus cx_params_get(const struct CxParams *params, const char *name, double *value);

/**
 * Parses a Hamiltonian and binds it to `params` (null for defaults).
 *
 * # Safety
 * `source` must be NUL-terminated; `params` null or live; `flow` writable.
 */
enum CxStatus cx_flow_parse(const char *source,
                            const struct CxParams *params,
                            struct CxFlow **flow);

/**
 * Flow of a named scenario (`harmonic`, `imaginary`, `attenuated`) with
 * `params` overriding its defaults.
 *
 * # Safety
 * As for `cx_flow_parse`.
 */
enum CxStatus cx_flow_from_scenario(const char *name,
                                    const struct CxParams *params,
                                    struct CxFlow **flow);

/**
 * # Safety
 * `flow` must be null or a live flow handle.
 */
void cx_flow_free(struct CxFlow *flow);

/**
 * Generalized Hamilton equations at `(q, p, t)`.
 *
 * # Safety
 * `flow` must be live; outputs writable.
 */
enum CxStatus cx_flow_eom(const struct CxFlow *flow,
                          double q,
                          double p,
                          double t,
                          double *qdot,
                          double *pdot);

/**
 * Dual field `z_dH` at `(q, p, t)`.
 *
 * # Safety
 * `flow` must be live; outputs writable.
 */
enum CxStatus cx_flow_z_dh(const struct CxFlow *flow,
                           double q,
                           double p,
                           double t,
                           double *re,
                           double *im);

/**
 * Curvature of the selected curve at one state. Returns `CX_STATUS_SINGULAR`
 * where the curve is stationary.
 *
 * # Safety
 * `flow` must be live; `kappa` writable.
 */
enum CxStatus cx_curvature(const struct CxFlow *flow,
                           double q,
                           double p,
                           double t,
                           enum CxCurve curve,
                           double *kappa);

/**
 * Fixed-step RK4: `nsteps` steps of size `step` from `(q0, p0, t0)`.
 *
 * # Safety
 * `flow` must be live; `traj` writable.
 */
enum CxStatus cx_integrate_rk4(const struct CxFlow *flow,
                               double q0,
                               double p0,
                               double t0,
                               double step,
                               size_t nsteps,
                               struct CxTrajectory **traj);

/**
 * Adaptive Dormand–Prince integration up to `t_end`.
 *
 * # Safety
 * `flow` must be live; `traj` writable.
 */
enum CxStatus cx_integrate_adaptive(const struct CxFlow *flow,
                                    double q0,
                                    double p0,
                                    double t0,
                                    double t_end,
                                    double rel_tol,
                                    double abs_tol,
                                    struct CxTrajectory **traj);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or live.
 */
size_t cx_trajectory_len(const struct CxTrajectory *traj);

/**
 * # Safety
 * `traj` must be live; `sample` writable.
 */
enum CxStatus cx_trajectory_sample(const struct CxTrajectory *traj,
                                   size_t index,
                                   struct CxSample *sample);

/**
 * # Safety
 * `traj` must be null or live.
 */
void cx_trajectory_free(struct CxTrajectory *traj);

/**
 * Quantum energy of a named scenario under its recipe.
 *
 * # Safety
 * `name` NUL-terminated; `params` null or live; `energy` writable.
 */
enum CxStatus cx_quantum_energy(const char *name, const struct CxParams *params, double *energy);

/**
 * Engine value of one scenario commutator.
 *
 * # Safety
 * `name` NUL-terminated; `params` null or live; outputs writable.
 */
enum CxStatus cx_commutator(const char *name,
                            const struct CxParams *params,
                            enum CxBracket bracket,
                            double *re,
                            double *im);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CXMECH_H */
