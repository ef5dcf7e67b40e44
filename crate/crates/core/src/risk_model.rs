//! Risk of a probabilistic design versus a worst-case design when the
//! modeled uncertainty set `B` misses part of the true set `U`.
//!
//! With `M = U ∩ B` (modeled and possible) and `E = U ∩ B̄` (possible but
//! unmodeled), a worst-case controller never fails on `M`, so
//!
//! ```text
//! P_e^p = Pr{C_p fails | M}·Pr{M} + Pr{C_p fails | E}·Pr{E}
//! P_e^w = Pr{C_w fails | E}·Pr{E}
//! ```
//!
//! The modeled-but-impossible set `N = Ū ∩ B` enters no formula and is not
//! represented.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskScenario {
    /// `Pr{q ∈ M}`
    pub pr_m: f64,
    /// `Pr{q ∈ E}`
    pub pr_e: f64,
    /// `Pr{C_p fails | q ∈ M}`
    pub v_p_given_m: f64,
    /// `Pr{C_p fails | q ∈ E}`
    pub v_p_given_e: f64,
    /// `Pr{C_w fails | q ∈ E}`
    pub v_w_given_e: f64,
}

impl RiskScenario {
    pub fn new(
        pr_m: f64,
        pr_e: f64,
        v_p_given_m: f64,
        v_p_given_e: f64,
        v_w_given_e: f64,
    ) -> Result<Self> {
        let s = Self {
            pr_m,
            pr_e,
            v_p_given_m,
            v_p_given_e,
            v_w_given_e,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("pr_M", self.pr_m),
            ("pr_E", self.pr_e),
            ("v_p|M", self.v_p_given_m),
            ("v_p|E", self.v_p_given_e),
            ("v_w|E", self.v_w_given_e),
        ];
        for (name, v) in fields {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "violated 0 <= {name} <= 1 ({name} = {v})"
                )));
            }
        }
        // Allow for rounding when the two masses are computed as complements.
        if self.pr_m + self.pr_e > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "violated pr_M + pr_E <= 1 ({} + {})",
                self.pr_m, self.pr_e
            )));
        }
        Ok(())
    }
}

/// `P_e^p`, the failure probability of the probabilistic design.
pub fn risk_probabilistic(s: &RiskScenario) -> f64 {
    s.v_p_given_m * s.pr_m + s.v_p_given_e * s.pr_e
}

/// `P_e^w`, the failure probability of the worst-case design.
pub fn risk_worstcase(s: &RiskScenario) -> f64 {
    s.v_w_given_e * s.pr_e
}

/// `P_e^p / P_e^w`; `+∞` when only the probabilistic design can fail and
/// `1` when neither can.
pub fn risk_ratio(s: &RiskScenario) -> f64 {
    let p = risk_probabilistic(s);
    let w = risk_worstcase(s);
    match (p > 0.0, w > 0.0) {
        (_, true) => p / w,
        (true, false) => f64::INFINITY,
        (false, false) => 1.0,
    }
}

/// The two-term decomposition of the ratio:
/// `v_p|E / v_w|E` (behaviour outside the model) and
/// `v_p|M·pr_M / (v_w|E·pr_E)` (accepted risk inside it).
/// `None` when `P_e^w = 0`.
pub fn risk_ratio_terms(s: &RiskScenario) -> Option<(f64, f64)> {
    let w = risk_worstcase(s);
    if w > 0.0 {
        Some((s.v_p_given_e / s.v_w_given_e, s.v_p_given_m * s.pr_m / w))
    } else {
        None
    }
}

/// Approximate ratio assuming the probabilistic design degrades flatly
/// (`v_p|E ≈ v_p|M`): `v_p|M / (v_w|E·pr_E)`.
pub fn flat_degradation_ratio(s: &RiskScenario) -> Result<f64> {
    let w = risk_worstcase(s);
    if w.is_nan() || w <= 0.0 {
        return Err(Error::invalid(
            "flat-degradation ratio needs v_w|E * pr_E > 0",
        ));
    }
    Ok(s.v_p_given_m / w)
}

/// Sufficient condition for `P_e^p < P_e^w`: the out-of-model failure rates
/// compare as `v_p|E/v_w|E ≤ λ` and the accepted in-model risk satisfies
/// `v_p|M·pr_M/pr_E < (1 - λ)·v_w|E`.
pub fn ratio_below_one_certificate(s: &RiskScenario, lambda: f64) -> Result<bool> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!(
            "lambda must lie in (0, 1), got {lambda}"
        )));
    }
    if s.pr_e <= 0.0 {
        return Err(Error::invalid("certificate needs pr_E > 0"));
    }
    if s.v_w_given_e <= 0.0 {
        return Err(Error::invalid("certificate needs v_w|E > 0"));
    }
    let outside = s.v_p_given_e / s.v_w_given_e <= lambda;
    let inside = s.v_p_given_m * s.pr_m / s.pr_e < (1.0 - lambda) * s.v_w_given_e;
    Ok(outside && inside)
}
