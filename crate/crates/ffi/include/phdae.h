#ifndef PHDAE_H
#define PHDAE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PhdaeStatus {
  PHDAE_STATUS_OK = 0,
  PHDAE_STATUS_NULL_POINTER = 1,
  PHDAE_STATUS_INVALID_ARGUMENT = 2,
  PHDAE_STATUS_UNKNOWN_MODEL = 3,
  PHDAE_STATUS_DIMENSION_MISMATCH = 4,
  PHDAE_STATUS_NUMERICAL = 5,
  PHDAE_STATUS_PANIC = 6,
} PhdaeStatus;

/**
 * A built system with its default initial state and boundary forcing.
 */
typedef struct PhdaeSystem PhdaeSystem;

/**
 * Result of `phdae_system_integrate`.
 */
typedef struct PhdaeRunSummary {
  size_t steps;
  double h_initial;
  double h_final;
  /**
   * Largest per-step `|ΔH - dt·(supplied - dissipated)|`.
   */
  double max_balance_residual;
} PhdaeRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds `model` on a grid with `n` cells per direction and default
 * parameters, closed boundary.
 *
 * # Safety
 * `model` must be a NUL-terminated string; `out` must be writable.
 */
enum PhdaeStatus phdae_scenario_new(const char *model, size_t n, struct PhdaeSystem **out);

/**
 * Builds the scenario described by INI text, as accepted by `phdae run`.
 *
 * # Safety
 * `ini` must be a NUL-terminated string; `out` must be writable.
 */
enum PhdaeStatus phdae_scenario_from_config(const char *ini, struct PhdaeSystem **out);

/**
 * # Safety
 * `sys` must come from a constructor above and not be used afterwards.
 * Null is ignored.
 */
void phdae_system_free(struct PhdaeSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum PhdaeStatus phdae_system_state_dim(const struct PhdaeSystem *sys, size_t *out);

/**
 * Copies the default initial state into `buf[0..len]`; `len` must equal the
 * state dimension.
 *
 * # Safety
 * `sys` must be a live handle; `buf` must hold `len` doubles.
 */
enum PhdaeStatus phdae_system_initial_state(const struct PhdaeSystem *sys, double *buf, size_t len);

/**
 * # Safety
 * `sys` must be a live handle; `z` must hold `len` doubles; `out` writable.
 */
enum PhdaeStatus phdae_system_hamiltonian(const struct PhdaeSystem *sys,
                                          const double *z,
                                          size_t len,
                                          double *out);

/**
 * Writes 1 to `pass` if `J` is skew, `Q`, `R`, `M` symmetric and `R`, `M`
 * pass the definiteness probes, else 0.
 *
 * # Safety
 * `sys` must be a live handle; `pass` must be writable.
 */
enum PhdaeStatus phdae_system_check_structure(const struct PhdaeSystem *sys, int *pass);

/**
 * Integrates from `z0` (or the default initial state when `z0` is null)
 * with the scenario's forcing, writes the final state into `z_final` when
 * it is non-null, and fills `summary`.
 *
 * # Safety
 * `sys` must be a live handle; non-null `z0` and `z_final` must hold `len`
 * doubles; `summary` must be writable.
 */
enum PhdaeStatus phdae_system_integrate(const struct PhdaeSystem *sys,
                                        const double *z0,
                                        double *z_final,
                                        size_t len,
                                        double t_final,
                                        double dt,
                                        struct PhdaeRunSummary *summary);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`) and returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must hold `len` bytes or be null with `len == 0`.
 */
size_t phdae_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHDAE_H */
