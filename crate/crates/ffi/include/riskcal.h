/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RISKCAL_H
#define RISKCAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  RISKCAL_STATUS_OK = 0,
  /**
   * A parameter violates the model's assumptions.
   */
  RISKCAL_STATUS_INVALID_ARGUMENT = 1,
  RISKCAL_STATUS_NULL_POINTER = 2,
  /**
   * Quadrature did not converge.
   */
  RISKCAL_STATUS_NUMERICAL_FAILURE = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  RISKCAL_STATUS_INTERNAL_ERROR = 4,
} RiskcalStatus;

/**
 * Values accepted by the `controller` argument of [`riskcal_mc_estimate`].
 */
typedef enum {
  RISKCAL_CONTROLLER_A = 0,
  RISKCAL_CONTROLLER_B = 1,
} RiskcalController;

/**
 * Values accepted by the `kind` argument of [`riskcal_destabilize`].
 */
typedef enum {
  /**
   * Plant denominator coefficient `α_τ`, `1 ≤ τ ≤ κ`.
   */
  RISKCAL_COEFFICIENT_KIND_DENOMINATOR = 0,
  /**
   * Plant numerator coefficient `β_ι`, `0 ≤ ι ≤ ℓ`.
   */
  RISKCAL_COEFFICIENT_KIND_NUMERATOR = 1,
} RiskcalCoefficientKind;

/**
 * Opaque scenario handle. Create with [`riskcal_case_new`] or
 * [`riskcal_case_table_row`], release with [`riskcal_case_free`].
 */
typedef struct RiskcalCase RiskcalCase;

typedef struct {
  double rho_a;
  double rho_b;
  double rho_b_star;
  bool b_may_fail_while_a_robust;
} RiskcalMargins;

typedef struct {
  double lhs;
  double rhs;
  bool holds;
} RiskcalSufficientCondition;

typedef struct {
  double p_hat;
  double ci_low;
  double ci_high;
  uint64_t successes;
  uint64_t samples;
  uint64_t seed;
} RiskcalEstimate;

typedef struct {
  double probabilistic;
  double worst_case;
  /**
   * `+inf` when only the probabilistic design can fail, 1 when neither can.
   */
  double ratio;
} RiskcalRisk;

typedef struct {
  double offset;
  double nominal;
  double value;
  double slack;
  bool verified;
} RiskcalDestabilization;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *riskcal_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *riskcal_version(void);

/**
 * Creates a validated scenario.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
RiskcalStatus riskcal_case_new(double a,
                               double r,
                               double p0,
                               double q0,
                               double sigma_p,
                               double sigma_q,
                               double k_a,
                               double k_b,
                               RiskcalCase **out);

/**
 * Creates the scenario of row 1 or 2 of the comparison table.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
RiskcalStatus riskcal_case_table_row(uint32_t row, RiskcalCase **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `case` must come from this library and not be freed twice.
 */
void riskcal_case_free(RiskcalCase *case_);

/**
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_margins(const RiskcalCase *case_, RiskcalMargins *out);

/**
 * Gaussian mass of the uncertainty box.
 *
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_coverage_probability(const RiskcalCase *case_, double *out);

/**
 * Area fraction of the box stabilized by the static-gain controller.
 *
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_stable_fraction(const RiskcalCase *case_, double *out);

/**
 * Failure probability of the dynamic controller, to absolute tolerance `tol`.
 *
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_prob_instability_a(const RiskcalCase *case_, double tol, double *out);

/**
 * Failure probability of the static-gain controller.
 *
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_prob_instability_b(const RiskcalCase *case_, double *out);

/**
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_sufficient_condition(const RiskcalCase *case_,
                                           RiskcalSufficientCondition *out);

/**
 * Monte Carlo failure probability of controller `controller`
 * ([`RiskcalController`]) under the Gaussian law, or over the box when
 * `uniform_box` is set. `partitions = 0` selects the default.
 *
 * # Safety
 * `case` must be a live handle; `out` must be writable.
 */
RiskcalStatus riskcal_mc_estimate(const RiskcalCase *case_,
                                  uint32_t controller,
                                  bool uniform_box,
                                  uint64_t samples,
                                  uint64_t seed,
                                  double confidence,
                                  uint32_t partitions,
                                  RiskcalEstimate *out);

/**
 * Smallest sample count that detects an `epsilon`-non-robust system with
 * probability at least `1 - delta`.
 *
 * # Safety
 * `out` must be writable.
 */
RiskcalStatus riskcal_required_samples(double epsilon, double delta, uint64_t *out);

/**
 * Failure risks of the probabilistic and worst-case designs.
 *
 * # Safety
 * `out` must be writable.
 */
RiskcalStatus riskcal_risk(double pr_m,
                           double pr_e,
                           double v_p_given_m,
                           double v_p_given_e,
                           double v_w_given_e,
                           RiskcalRisk *out);

/**
 * Sufficient condition, at level `lambda`, for the probabilistic design to
 * be the less risky one.
 *
 * # Safety
 * `out` must be writable.
 */
RiskcalStatus riskcal_ratio_certificate(double pr_m,
                                        double pr_e,
                                        double v_p_given_m,
                                        double v_p_given_e,
                                        double v_w_given_e,
                                        double lambda,
                                        bool *out);

/**
 * Routh–Hurwitz test of a polynomial given in descending powers.
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles; `out` must be writable.
 */
RiskcalStatus riskcal_is_hurwitz(const double *coeffs, size_t len, bool *out);

/**
 * Destabilizing value for one plant coefficient of a stable loop. All
 * polynomials are in descending powers; both denominators must be monic.
 * `kind` is a [`RiskcalCoefficientKind`]. A `slack` that is not positive
 * selects the default margin.
 *
 * # Safety
 * Each array pointer must reference the stated number of readable doubles;
 * `out` must be writable.
 */
RiskcalStatus riskcal_destabilize(const double *plant_num,
                                  size_t plant_num_len,
                                  const double *plant_den,
                                  size_t plant_den_len,
                                  const double *ctrl_num,
                                  size_t ctrl_num_len,
                                  const double *ctrl_den,
                                  size_t ctrl_den_len,
                                  uint32_t kind,
                                  size_t index,
                                  double slack,
                                  RiskcalDestabilization *out);

/**
 * # Safety
 * `out` must be writable.
 */
RiskcalStatus riskcal_erf(double x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RISKCAL_H */
