//! C ABI over `riskcal`.
//!
//! Every fallible function returns a [`RiskcalStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and a
//! message is available from [`riskcal_last_error_message`] on the same
//! thread. Scenario parameters live behind an opaque [`RiskcalCase`] handle.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use riskcal::case_study::{
    coverage_probability, margins, prob_instability_a, prob_instability_b, stable_a, stable_b,
    stable_fraction, sufficient_condition, FirstOrderCase,
};
use riskcal::gaussian_quad::erf;
use riskcal::mc_engine::{estimate_probability, required_samples, uniform_box_fraction, McConfig};
use riskcal::poly_stability::{
    destabilizing_value, is_hurwitz, CoefficientIndex, Polynomial, RationalTF,
};
use riskcal::risk_model::{
    ratio_below_one_certificate, risk_probabilistic, risk_ratio, risk_worstcase, RiskScenario,
};
use riskcal::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiskcalStatus {
    Ok = 0,
    /// A parameter violates the model's assumptions.
    InvalidArgument = 1,
    NullPointer = 2,
    /// Quadrature did not converge.
    NumericalFailure = 3,
    /// A Rust panic was caught at the boundary.
    InternalError = 4,
}

/// Values accepted by the `controller` argument of [`riskcal_mc_estimate`].
#[repr(C)]
pub enum RiskcalController {
    A = 0,
    B = 1,
}

/// Values accepted by the `kind` argument of [`riskcal_destabilize`].
#[repr(C)]
pub enum RiskcalCoefficientKind {
    /// Plant denominator coefficient `α_τ`, `1 ≤ τ ≤ κ`.
    Denominator = 0,
    /// Plant numerator coefficient `β_ι`, `0 ≤ ι ≤ ℓ`.
    Numerator = 1,
}

/// Opaque scenario handle. Create with [`riskcal_case_new`] or
/// [`riskcal_case_table_row`], release with [`riskcal_case_free`].
pub struct RiskcalCase(FirstOrderCase);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RiskcalMargins {
    pub rho_a: f64,
    pub rho_b: f64,
    pub rho_b_star: f64,
    pub b_may_fail_while_a_robust: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RiskcalSufficientCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RiskcalEstimate {
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub samples: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RiskcalRisk {
    pub probabilistic: f64,
    pub worst_case: f64,
    /// `+inf` when only the probabilistic design can fail, 1 when neither can.
    pub ratio: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RiskcalDestabilization {
    pub offset: f64,
    pub nominal: f64,
    pub value: f64,
    pub slack: f64,
    pub verified: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RiskcalStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_numerical() {
            RiskcalStatus::NumericalFailure
        } else {
            RiskcalStatus::InvalidArgument
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(RiskcalStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RiskcalStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RiskcalStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal error: panic caught at the C boundary".into());
            RiskcalStatus::InternalError
        }
    }
}

unsafe fn case_ref<'a>(case: *const RiskcalCase) -> Result<&'a FirstOrderCase, Failure> {
    case.as_ref().map(|c| &c.0).ok_or_else(|| null("case"))
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn riskcal_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn riskcal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a validated scenario.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn riskcal_case_new(
    a: f64,
    r: f64,
    p0: f64,
    q0: f64,
    sigma_p: f64,
    sigma_q: f64,
    k_a: f64,
    k_b: f64,
    out: *mut *mut RiskcalCase,
) -> RiskcalStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let case = FirstOrderCase {
            a,
            k_a,
            k_b,
            p0,
            q0,
            sigma_p,
            sigma_q,
            r,
        };
        case.validate()?;
        out.write(Box::into_raw(Box::new(RiskcalCase(case))));
        Ok(())
    })
}

/// Creates the scenario of row 1 or 2 of the comparison table.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn riskcal_case_table_row(
    row: u32,
    out: *mut *mut RiskcalCase,
) -> RiskcalStatus {
    guard(|| {
        let case = match row {
            1 => FirstOrderCase::ROW1,
            2 => FirstOrderCase::ROW2,
            _ => {
                return Err(Failure(
                    RiskcalStatus::InvalidArgument,
                    format!("no table row {row}"),
                ))
            }
        };
        write(out, "out", Box::into_raw(Box::new(RiskcalCase(case))))
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `case` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn riskcal_case_free(case: *mut RiskcalCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_margins(
    case: *const RiskcalCase,
    out: *mut RiskcalMargins,
) -> RiskcalStatus {
    guard(|| {
        let m = margins(case_ref(case)?);
        write(
            out,
            "out",
            RiskcalMargins {
                rho_a: m.rho_a,
                rho_b: m.rho_b,
                rho_b_star: m.rho_b_star,
                b_may_fail_while_a_robust: m.b_may_fail_while_a_robust,
            },
        )
    })
}

/// Gaussian mass of the uncertainty box.
///
/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_coverage_probability(
    case: *const RiskcalCase,
    out: *mut f64,
) -> RiskcalStatus {
    guard(|| write(out, "out", coverage_probability(case_ref(case)?)))
}

/// Area fraction of the box stabilized by the static-gain controller.
///
/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_stable_fraction(
    case: *const RiskcalCase,
    out: *mut f64,
) -> RiskcalStatus {
    guard(|| write(out, "out", stable_fraction(case_ref(case)?)))
}

/// Failure probability of the dynamic controller, to absolute tolerance `tol`.
///
/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_prob_instability_a(
    case: *const RiskcalCase,
    tol: f64,
    out: *mut f64,
) -> RiskcalStatus {
    guard(|| write(out, "out", prob_instability_a(case_ref(case)?, tol)?))
}

/// Failure probability of the static-gain controller.
///
/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_prob_instability_b(
    case: *const RiskcalCase,
    out: *mut f64,
) -> RiskcalStatus {
    guard(|| write(out, "out", prob_instability_b(case_ref(case)?)))
}

/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_sufficient_condition(
    case: *const RiskcalCase,
    out: *mut RiskcalSufficientCondition,
) -> RiskcalStatus {
    guard(|| {
        let s = sufficient_condition(case_ref(case)?)?;
        write(
            out,
            "out",
            RiskcalSufficientCondition {
                lhs: s.lhs,
                rhs: s.rhs,
                holds: s.holds,
            },
        )
    })
}

/// Monte Carlo failure probability of controller `controller`
/// ([`RiskcalController`]) under the Gaussian law, or over the box when
/// `uniform_box` is set. `partitions = 0` selects the default.
///
/// # Safety
/// `case` must be a live handle; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn riskcal_mc_estimate(
    case: *const RiskcalCase,
    controller: u32,
    uniform_box: bool,
    samples: u64,
    seed: u64,
    confidence: f64,
    partitions: u32,
    out: *mut RiskcalEstimate,
) -> RiskcalStatus {
    guard(|| {
        let case = case_ref(case)?;
        let mut cfg = McConfig {
            samples,
            confidence,
            seed,
            ..McConfig::default()
        };
        if partitions > 0 {
            cfg.partitions = partitions;
        }
        let est = match (controller, uniform_box) {
            (0, false) => estimate_probability(|p, q| !stable_a(p, q, case), case, &cfg)?,
            (1, false) => estimate_probability(|p, q| !stable_b(p, q, case), case, &cfg)?,
            (0, true) => uniform_box_fraction(|p, q| !stable_a(p, q, case), case, &cfg)?,
            (1, true) => uniform_box_fraction(|p, q| !stable_b(p, q, case), case, &cfg)?,
            _ => {
                return Err(Failure(
                    RiskcalStatus::InvalidArgument,
                    format!("controller must be 0 (A) or 1 (B), got {controller}"),
                ))
            }
        };
        write(
            out,
            "out",
            RiskcalEstimate {
                p_hat: est.p_hat,
                ci_low: est.ci_low,
                ci_high: est.ci_high,
                successes: est.successes,
                samples: est.n,
                seed: est.seed,
            },
        )
    })
}

/// Smallest sample count that detects an `epsilon`-non-robust system with
/// probability at least `1 - delta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_required_samples(
    epsilon: f64,
    delta: f64,
    out: *mut u64,
) -> RiskcalStatus {
    guard(|| write(out, "out", required_samples(epsilon, delta)?.n_required))
}

/// Failure risks of the probabilistic and worst-case designs.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_risk(
    pr_m: f64,
    pr_e: f64,
    v_p_given_m: f64,
    v_p_given_e: f64,
    v_w_given_e: f64,
    out: *mut RiskcalRisk,
) -> RiskcalStatus {
    guard(|| {
        let s = RiskScenario::new(pr_m, pr_e, v_p_given_m, v_p_given_e, v_w_given_e)?;
        write(
            out,
            "out",
            RiskcalRisk {
                probabilistic: risk_probabilistic(&s),
                worst_case: risk_worstcase(&s),
                ratio: risk_ratio(&s),
            },
        )
    })
}

/// Sufficient condition, at level `lambda`, for the probabilistic design to
/// be the less risky one.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_ratio_certificate(
    pr_m: f64,
    pr_e: f64,
    v_p_given_m: f64,
    v_p_given_e: f64,
    v_w_given_e: f64,
    lambda: f64,
    out: *mut bool,
) -> RiskcalStatus {
    guard(|| {
        let s = RiskScenario::new(pr_m, pr_e, v_p_given_m, v_p_given_e, v_w_given_e)?;
        write(out, "out", ratio_below_one_certificate(&s, lambda)?)
    })
}

/// Routh–Hurwitz test of a polynomial given in descending powers.
///
/// # Safety
/// `coeffs` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_is_hurwitz(
    coeffs: *const f64,
    len: usize,
    out: *mut bool,
) -> RiskcalStatus {
    guard(|| {
        let p = Polynomial::new(slice(coeffs, len, "coeffs")?.to_vec())?;
        write(out, "out", is_hurwitz(&p)?)
    })
}

/// Destabilizing value for one plant coefficient of a stable loop. All
/// polynomials are in descending powers; both denominators must be monic.
/// `kind` is a [`RiskcalCoefficientKind`]. A `slack` that is not positive
/// selects the default margin.
///
/// # Safety
/// Each array pointer must reference the stated number of readable doubles;
/// `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn riskcal_destabilize(
    plant_num: *const f64,
    plant_num_len: usize,
    plant_den: *const f64,
    plant_den_len: usize,
    ctrl_num: *const f64,
    ctrl_num_len: usize,
    ctrl_den: *const f64,
    ctrl_den_len: usize,
    kind: u32,
    index: usize,
    slack: f64,
    out: *mut RiskcalDestabilization,
) -> RiskcalStatus {
    guard(|| {
        let tf = |num: &[f64], den: &[f64]| -> Result<RationalTF, Failure> {
            Ok(RationalTF::new(
                Polynomial::new(num.to_vec())?,
                Polynomial::new(den.to_vec())?,
            )?)
        };
        let plant = tf(
            slice(plant_num, plant_num_len, "plant_num")?,
            slice(plant_den, plant_den_len, "plant_den")?,
        )?;
        let controller = tf(
            slice(ctrl_num, ctrl_num_len, "ctrl_num")?,
            slice(ctrl_den, ctrl_den_len, "ctrl_den")?,
        )?;
        let which = match kind {
            0 => CoefficientIndex::PlantDenominator(index),
            1 => CoefficientIndex::PlantNumerator(index),
            _ => {
                return Err(Failure(
                    RiskcalStatus::InvalidArgument,
                    format!("kind must be 0 (denominator) or 1 (numerator), got {kind}"),
                ))
            }
        };
        let slack = (slack > 0.0).then_some(slack);
        let d = destabilizing_value(&controller, &plant, which, slack)?;
        write(
            out,
            "out",
            RiskcalDestabilization {
                offset: d.offset,
                nominal: d.nominal,
                value: d.value,
                slack: d.slack,
                verified: d.verified,
            },
        )
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn riskcal_erf(x: f64, out: *mut f64) -> RiskcalStatus {
    guard(|| write(out, "out", erf(x)?))
}
