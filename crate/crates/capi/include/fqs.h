#ifndef FQS_H
#define FQS_H

/* Generated by cbindgen from fqs-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes mirrored on the CLI exit codes.
 */
typedef enum FqsStatus {
  FQS_STATUS_OK = 0,
  FQS_STATUS_ERR_VALIDATION = 2,
  FQS_STATUS_ERR_NUMERICAL = 3,
  FQS_STATUS_ERR_NULL_ARGUMENT = 4,
  FQS_STATUS_ERR_PANIC = 5,
} FqsStatus;

/*
 Opaque driven-Hamiltonian handle.
 */
typedef struct FqsHamiltonian FqsHamiltonian;

/*
 Diagnostics of a pipeline run.
 */
typedef struct FqsRunDiagnostics {
  uint32_t l_max;
  double success_probability;
  /*
   Joint-space deviation from the oracle-evolved target state.
   */
  double deviation;
  /*
   Overlap |<psi_oracle|psi_out>| after projection.
   */
  double fidelity;
  double wall_time_s;
} FqsRunDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *fqs_last_error_message(void);

/*
 Driven qubit `H(t) = (delta/2) Z + v cos(omega t) X`. Returns null on
 invalid parameters.
 */
struct FqsHamiltonian *fqs_hamiltonian_driven_qubit(double delta, double v, double omega);

/*
 Two-site Fermi-Hubbard chain under monochromatic light (16-dimensional).
 */
struct FqsHamiltonian *fqs_hamiltonian_hubbard2(double eps_k0,
                                                double eps_k1,
                                                double u,
                                                double v_x0,
                                                double v_x1,
                                                double big_omega);

/*
 Build a Hamiltonian from `n_modes` Fourier components with a finite
 profile. `modes` holds the mode indices; `components` holds the matching
 d x d matrices, row-major interleaved, concatenated. Missing Hermitian
 partners are completed automatically.

 # Safety
 `modes` must point to `n_modes` ints and `components` to
 `n_modes * 2 * dim * dim` doubles.
 */
struct FqsHamiltonian *fqs_hamiltonian_from_components(uintptr_t dim,
                                                       double omega,
                                                       const int32_t *modes,
                                                       const double *components,
                                                       uintptr_t n_modes,
                                                       uint32_t m_max);

/*
 Release a Hamiltonian handle (null is a no-op).

 # Safety
 `h` must have come from an `fqs_hamiltonian_*` constructor.
 */
void fqs_hamiltonian_free(struct FqsHamiltonian *h);

/*
 System dimension d of a handle (0 for null).

 # Safety
 `h` must be a live handle or null.
 */
uintptr_t fqs_hamiltonian_dim(const struct FqsHamiltonian *h);

/*
 Drive period `T = 2 pi / omega` (0 for null).

 # Safety
 `h` must be a live handle or null.
 */
double fqs_hamiltonian_period(const struct FqsHamiltonian *h);

/*
 Evaluate `H(t)` into a caller buffer of 2 d^2 doubles.

 # Safety
 `out` must hold `2 dim^2` doubles.
 */
enum FqsStatus fqs_evaluate_at(const struct FqsHamiltonian *h, double t, double *out);

/*
 Energy scales: `alpha = sum ||H_m||`, the grid estimate of
 `sup_t ||H(t) - H_0||`, and the certified upper bound `sum_{m!=0} ||H_m||`.

 # Safety
 Output pointers must be valid; `h` must be a live handle.
 */
enum FqsStatus fqs_energy_scales(const struct FqsHamiltonian *h,
                                 uint32_t n_grid,
                                 double *alpha_out,
                                 double *gamma_out,
                                 double *gamma_upper_out);

/*
 Truncation order for a finite profile (the selection formula of the
 adiabatic pipeline).

 # Safety
 `l_max_out` must be a valid pointer.
 */
enum FqsStatus fqs_choose_l_max(double gamma,
                                double t,
                                uint32_t m_max,
                                double epsilon,
                                uint32_t *l_max_out);

/*
 Truncation bound `20 m (gt)^ceil(l/m) / ceil(l/m)!`; the premise flag
 (`l_max >= 2 m gamma t`) is written when the pointer is non-null.

 # Safety
 `premise_ok_out` may be null.
 */
double fqs_truncation_bound(uint32_t l_max,
                            double gamma,
                            double t,
                            uint32_t m_max,
                            bool *premise_ok_out);

/*
 Transition-amplitude bound for finitely many modes.

 # Safety
 `premise_ok_out` may be null.
 */
double fqs_lr_bound(uint64_t dl, double gamma, double t, uint32_t m_max, bool *premise_ok_out);

/*
 Smallest polynomial degree whose Jacobi-Anger truncation error is below
 epsilon, with the certified tail value.

 # Safety
 `q_out` must be valid; `tail_out` may be null.
 */
enum FqsStatus fqs_query_degree(double tau, double epsilon, uint32_t *q_out, double *tail_out);

/*
 Reference time-ordered evolution `psi(t)` by adaptive integration.

 # Safety
 `psi0` and `psi_out` must hold `2 dim` doubles each.
 */
enum FqsStatus fqs_exact_evolve(const struct FqsHamiltonian *h,
                                const double *psi0,
                                double t,
                                double tol,
                                double *psi_out);

/*
 Adiabatic-like pipeline (two-stage amplification with the refined
 effective Hamiltonian); writes the projected state and diagnostics.

 # Safety
 `psi0`/`psi_out` must hold `2 dim` doubles; `diag_out` may be null.
 */
enum FqsStatus fqs_run_adiabatic(const struct FqsHamiltonian *h,
                                 const double *psi0,
                                 double t,
                                 double epsilon,
                                 double *psi_out,
                                 struct FqsRunDiagnostics *diag_out);

/*
 Long-time pipeline (`t = (n + delta) T` splitting).

 # Safety
 `psi0`/`psi_out` must hold `2 dim` doubles; `diag_out` may be null.
 */
enum FqsStatus fqs_run_longtime(const struct FqsHamiltonian *h,
                                const double *psi0,
                                double t,
                                double epsilon,
                                double *psi_out,
                                struct FqsRunDiagnostics *diag_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FQS_H */
