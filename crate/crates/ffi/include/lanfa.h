#ifndef LANFA_H
#define LANFA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LanfaStatus {
  LANFA_STATUS_OK = 0,
  LANFA_STATUS_NULL_POINTER = 1,
  LANFA_STATUS_INVALID_ARGUMENT = 2,
  LANFA_STATUS_DIMENSION_MISMATCH = 3,
  LANFA_STATUS_SINGULAR_SHIFT = 4,
  LANFA_STATUS_DOMAIN = 5,
  LANFA_STATUS_SINGULAR_INTEGRAND = 6,
  LANFA_STATUS_ENCLOSURE = 7,
  LANFA_STATUS_UNSUPPORTED = 8,
  LANFA_STATUS_NUMERICAL = 9,
  LANFA_STATUS_IO = 10,
  LANFA_STATUS_BUFFER_TOO_SMALL = 11,
  LANFA_STATUS_PANIC = 12,
} LanfaStatus;

typedef enum LanfaPrecision {
  LANFA_PRECISION_FP64 = 0,
  LANFA_PRECISION_FP32 = 1,
} LanfaPrecision;

typedef enum LanfaPiecewise {
  /**
   * `|x - a|`
   */
  LANFA_PIECEWISE_ABS = 0,
  /**
   * `step(x - a)`
   */
  LANFA_PIECEWISE_STEP = 1,
  /**
   * `step(x - a) / x`
   */
  LANFA_PIECEWISE_STEP_OVER_X = 2,
} LanfaPiecewise;

/**
 * Lanczos factorization of an operator and a starting vector.
 */
typedef struct LanfaFactorization LanfaFactorization;

/**
 * Symmetric operator.
 */
typedef struct LanfaOperator LanfaOperator;

/**
 * One row of a bound curve. `fp_term` is NaN when the correction was not
 * requested.
 */
typedef struct LanfaBoundRow {
  uintptr_t k;
  double true_err;
  double err_w;
  double res_w;
  double integral_term;
  double bound;
  double fp_term;
  double quad_err;
} LanfaBoundRow;

/**
 * One row of a quadratic-form bound curve.
 */
typedef struct LanfaQuadformRow {
  uintptr_t k;
  double true_err;
  double res_w_sq;
  double integral_term;
  double bound;
  double quad_err;
} LanfaQuadformRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *lanfa_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lanfa_version(void);

/**
 * Diagonal operator with the given `n` eigenvalues.
 *
 * # Safety
 * `eigenvalues` must point to `n` readable doubles; `out` must be writable.
 */
enum LanfaStatus lanfa_operator_diagonal(const double *eigenvalues,
                                         uintptr_t n,
                                         struct LanfaOperator **out);

/**
 * Dense symmetric operator from `n * n` row-major entries.
 *
 * # Safety
 * `data` must point to `n * n` readable doubles; `out` must be writable.
 */
enum LanfaStatus lanfa_operator_dense(const double *data, uintptr_t n, struct LanfaOperator **out);

/**
 * Operator read from a Matrix Market file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum LanfaStatus lanfa_operator_read(const char *path, struct LanfaOperator **out);

/**
 * Uniformly spaced spectrum on `[lmin, lmax]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_operator_uniform(uintptr_t n,
                                        double lmin,
                                        double lmax,
                                        struct LanfaOperator **out);

/**
 * Strakos spectrum with largest eigenvalue `lambda1`, smallest `lambdan`
 * and clustering parameter `rho`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_operator_strakos(uintptr_t n,
                                        double lambda1,
                                        double lambdan,
                                        double rho,
                                        struct LanfaOperator **out);

/**
 * Wishart matrix `X X^T`, `X` of size `n x m`, from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_operator_wishart(uintptr_t n,
                                        uintptr_t m,
                                        uint64_t seed,
                                        struct LanfaOperator **out);

/**
 * `n - 1` eigenvalues uniform on `[0, 1]` plus one at `kappa`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_operator_outlier(uintptr_t n, double kappa, struct LanfaOperator **out);

/**
 * Dimension of the operator, or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle.
 */
uintptr_t lanfa_operator_dim(const struct LanfaOperator *op);

/**
 * `y = A x`.
 *
 * # Safety
 * `x` and `y` must each hold `n` doubles, `n` the operator dimension.
 */
enum LanfaStatus lanfa_operator_apply(const struct LanfaOperator *op,
                                      const double *x,
                                      double *y,
                                      uintptr_t n);

/**
 * # Safety
 * `op` must be null or a handle not yet freed.
 */
void lanfa_operator_free(struct LanfaOperator *op);

/**
 * Runs `k` Lanczos steps from `b` (length `n`).
 *
 * # Safety
 * `op` must be a live handle, `b` must hold `n` doubles and `out` must be
 * writable.
 */
enum LanfaStatus lanfa_lanczos(const struct LanfaOperator *op,
                               const double *b,
                               uintptr_t n,
                               uintptr_t k,
                               bool reorth,
                               enum LanfaPrecision precision,
                               struct LanfaFactorization **out);

/**
 * Number of completed steps, or 0 for a null handle.
 *
 * # Safety
 * `fact` must be null or a live handle.
 */
uintptr_t lanfa_factorization_steps(const struct LanfaFactorization *fact);

/**
 * Writes the Ritz values in increasing order. `cap` is the capacity of
 * `out`; with too small a buffer nothing is written and `*written` holds
 * the required length.
 *
 * # Safety
 * `fact` must be a live handle, `out` must hold `cap` doubles and
 * `written` must be writable.
 */
enum LanfaStatus lanfa_factorization_ritz(const struct LanfaFactorization *fact,
                                          double *out,
                                          uintptr_t cap,
                                          uintptr_t *written);

/**
 * # Safety
 * `fact` must be null or a handle not yet freed.
 */
void lanfa_factorization_free(struct LanfaFactorization *fact);

/**
 * Lanczos-FA approximation `||b|| Q f(T) e_1` of `f(A) b`, written to
 * `out` of length `n` (the operator dimension). `function` uses the
 * command-line syntax, e.g. `sqrt`, `invpow:2`, `step:0.5`.
 *
 * # Safety
 * `fact` must be a live handle, `function` NUL-terminated and `out` must
 * hold `n` doubles.
 */
enum LanfaStatus lanfa_fa(const struct LanfaFactorization *fact,
                          const char *function,
                          double *out,
                          uintptr_t n);

/**
 * Gauss quadrature estimate `||b||^2 e_1^T f(T) e_1` of `b^T f(A) b`.
 *
 * # Safety
 * `fact` must be a live handle, `function` NUL-terminated and `out`
 * writable.
 */
enum LanfaStatus lanfa_quadform(const struct LanfaFactorization *fact,
                                const char *function,
                                double *out);

/**
 * Closed-form constant of the square-root bound on the Pac-Man contour
 * with `w = 0` and the slit radius tending to zero.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_sqrt_pacman_constant(uintptr_t k, double lambda_max, double *out);

/**
 * Constant of the piecewise bounds on a double circle touching at `a`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_piecewise_constant(enum LanfaPiecewise kind,
                                          double a,
                                          double lambda_min,
                                          double lambda_max,
                                          double *out);

/**
 * `2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_cg_bound(double kappa, uintptr_t k, double *out);

/**
 * Iteration count after which some Galerkin residual on `[a, b] U [c, d]`
 * is below `eps`.
 *
 * # Safety
 * `out` must be writable.
 */
enum LanfaStatus lanfa_indefinite_iterations(double a,
                                             double b,
                                             double c,
                                             double d,
                                             double eps,
                                             double *out);

/**
 * Bound curve for `||f(A) b - lan_k||`, `k = 1..=kmax`. `settings` is
 * TOML with the keys of the command-line config file (`f`, `contour`,
 * `w`, `norm`, `sets`, `kmax`, ...), or null for defaults; problem keys
 * are ignored. Rows go to `rows` (capacity `cap`); `*written` receives
 * the row count, or the required capacity with `LANFA_STATUS_BUFFER_TOO_SMALL`.
 *
 * # Safety
 * `op` must be a live handle, `b` must hold `n` doubles, `settings` must
 * be null or NUL-terminated, `rows` must hold `cap` rows and `written`
 * must be writable.
 */
enum LanfaStatus lanfa_bound_curve(const struct LanfaOperator *op,
                                   const double *b,
                                   uintptr_t n,
                                   const char *settings_toml,
                                   struct LanfaBoundRow *rows,
                                   uintptr_t cap,
                                   uintptr_t *written);

/**
 * Bound curve for `|b^T f(A) b - ||b||^2 e_1^T f(T_k) e_1|`; arguments as
 * for [`lanfa_bound_curve`].
 *
 * # Safety
 * As for [`lanfa_bound_curve`].
 */
enum LanfaStatus lanfa_quadform_curve(const struct LanfaOperator *op,
                                      const double *b,
                                      uintptr_t n,
                                      const char *settings_toml,
                                      struct LanfaQuadformRow *rows,
                                      uintptr_t cap,
                                      uintptr_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LANFA_H */
