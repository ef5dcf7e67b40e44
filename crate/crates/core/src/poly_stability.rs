//! Polynomials in `s`, rational transfer functions and Hurwitz stability.
//!
//! Coefficients are stored in descending powers: `coeffs[0]` multiplies
//! `s^deg`. Plant and controller coefficient indices therefore address the
//! vectors directly (`α_0 = 1` is `den.coeffs()[0]` and so on).
//!
//! Besides the usual algebra this module implements the destabilizing
//! construction for an arbitrary robustly stabilizing controller: every
//! closed-loop coefficient is affine in any single plant coefficient, so a
//! value far enough outside the assumed range drives that coefficient to the
//! wrong sign and the loop loses stability.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First-column entries of the Routh array at or below this fraction of the
/// largest coefficient magnitude are treated as zero (marginal => unstable).
pub const ROUTH_ZERO_RELATIVE: f64 = 1e-12;

/// Real polynomial, descending powers of `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from descending-power coefficients. Leading exact
    /// zeros are dropped; an all-zero input becomes the zero polynomial `[0]`.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        if coeffs.is_empty() {
            return Err(Error::invalid("polynomial needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polynomial coefficient"));
        }
        let lead = coeffs
            .iter()
            .position(|&c| c != 0.0)
            .unwrap_or(coeffs.len() - 1);
        coeffs.drain(..lead);
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0] == 1.0
    }

    /// Coefficient multiplying `s^power` (zero beyond the degree).
    pub fn coeff_of_power(&self, power: usize) -> f64 {
        match self.degree().checked_sub(power) {
            Some(idx) => self.coeffs[idx],
            None => 0.0,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, &c| acc * s + c)
    }

    fn from_trusted(mut coeffs: Vec<f64>) -> Self {
        let lead = coeffs
            .iter()
            .position(|&c| c != 0.0)
            .unwrap_or(coeffs.len() - 1);
        coeffs.drain(..lead);
        Self { coeffs }
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Polynomial::new(v)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && !(first && i == deg) {
                continue;
            }
            let power = deg - i;
            let sign = if c < 0.0 { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = mag != 1.0 || power == 0;
            if show_mag {
                write!(f, "{mag}")?;
            }
            match power {
                0 => {}
                1 => f.write_str("s")?,
                _ => write!(f, "s^{power}")?,
            }
        }
        Ok(())
    }
}

/// Coefficient convolution.
pub fn poly_mul(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let mut out = vec![0.0; p.coeffs.len() + q.coeffs.len() - 1];
    for (i, &a) in p.coeffs.iter().enumerate() {
        for (j, &b) in q.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Polynomial::from_trusted(out)
}

fn poly_add(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let deg = p.degree().max(q.degree());
    let out = (0..=deg)
        .rev()
        .map(|power| p.coeff_of_power(power) + q.coeff_of_power(power))
        .collect();
    Polynomial::from_trusted(out)
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        poly_mul(self, rhs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        poly_add(self, rhs)
    }
}

/// Proper rational transfer function `num(s)/den(s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTF {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::invalid(
                "transfer function denominator is the zero polynomial",
            ));
        }
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(Error::Improper {
                num: num.degree(),
                den: den.degree(),
            });
        }
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num)?, Polynomial::new(den)?)
    }

    /// Static gain `k/1`.
    pub fn gain(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }
}

/// Characteristic polynomial of the unity-feedback loop, `den_C·den_G + num_C·num_G`.
pub fn closed_loop_charpoly(controller: &RationalTF, plant: &RationalTF) -> Polynomial {
    let den = &controller.den * &plant.den;
    let num = &controller.num * &plant.num;
    &den + &num
}

/// Routh array first column after sign normalization. Stops early (with the
/// offending entry as the last element) as soon as a non-positive or
/// numerically-zero pivot appears.
pub fn routh_first_column(p: &Polynomial) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sign = p.leading().signum();
    let c: Vec<f64> = p.coeffs.iter().map(|&x| x * sign).collect();
    let zero = ROUTH_ZERO_RELATIVE * c.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let mut prev: Vec<f64> = c.iter().step_by(2).copied().collect();
    let mut cur: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
    let mut column = vec![prev[0]];
    for _ in 0..p.degree() {
        let pivot = cur.first().copied().unwrap_or(0.0);
        column.push(pivot);
        if pivot <= zero {
            break;
        }
        let width = prev.len().max(cur.len());
        let at = |row: &[f64], j: usize| row.get(j).copied().unwrap_or(0.0);
        let next: Vec<f64> = (0..width.saturating_sub(1))
            .map(|j| (pivot * at(&prev, j + 1) - prev[0] * at(&cur, j + 1)) / pivot)
            .collect();
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(column)
}

/// True iff every root has strictly negative real part. Marginal cases
/// (a zero in the first Routh column) are reported as not Hurwitz.
pub fn is_hurwitz(p: &Polynomial) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let sign = p.leading().signum();
    let zero = ROUTH_ZERO_RELATIVE * p.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // All coefficients of a Hurwitz polynomial share the leading sign.
    if p.coeffs.iter().any(|&x| x * sign <= zero) {
        return Ok(false);
    }
    let column = routh_first_column(p)?;
    Ok(column.len() == p.degree() + 1 && column.iter().all(|&x| x > zero))
}

/// Which plant coefficient to perturb.
///
/// `PlantDenominator(τ)` addresses `α_τ` (`1 ≤ τ ≤ κ`; `α_0 = 1` is fixed),
/// `PlantNumerator(ι)` addresses `β_ι` (`0 ≤ ι ≤ ℓ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientIndex {
    PlantDenominator(usize),
    PlantNumerator(usize),
}

impl CoefficientIndex {
    /// All admissible indices for a plant.
    pub fn all_for(plant: &RationalTF) -> Vec<CoefficientIndex> {
        let den = (1..=plant.den.degree()).map(CoefficientIndex::PlantDenominator);
        let num = (0..=plant.num.degree()).map(CoefficientIndex::PlantNumerator);
        den.chain(num).collect()
    }

    fn check(self, plant: &RationalTF) -> Result<()> {
        let (index, lo, hi) = match self {
            CoefficientIndex::PlantDenominator(t) => (t, 1, plant.den.degree()),
            CoefficientIndex::PlantNumerator(i) => (i, 0, plant.num.degree()),
        };
        if index < lo || index > hi {
            return Err(Error::IndexOutOfRange { index, lo, hi });
        }
        Ok(())
    }
}

impl fmt::Display for CoefficientIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientIndex::PlantDenominator(t) => write!(f, "den:{t}"),
            CoefficientIndex::PlantNumerator(i) => write!(f, "num:{i}"),
        }
    }
}

impl std::str::FromStr for CoefficientIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("coefficient selector `{s}` is not den:N or num:N"));
        let (kind, idx) = s.split_once(':').ok_or_else(bad)?;
        let idx: usize = idx.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "den" => Ok(CoefficientIndex::PlantDenominator(idx)),
            "num" => Ok(CoefficientIndex::PlantNumerator(idx)),
            _ => Err(bad()),
        }
    }
}

fn check_theorem_form(controller: &RationalTF, plant: &RationalTF) -> Result<()> {
    if !controller.den.is_monic() {
        return Err(Error::NotMonic(controller.den.leading()));
    }
    if !plant.den.is_monic() {
        return Err(Error::NotMonic(plant.den.leading()));
    }
    if controller.num.is_zero() {
        return Err(Error::ZeroLeadingNumerator);
    }
    Ok(())
}

// Σ x_i y_j over i + j = t (zero when t is negative).
fn conv_at(x: &[f64], y: &[f64], t: i64) -> f64 {
    if t < 0 {
        return 0.0;
    }
    let t = t as usize;
    let lo = t.saturating_sub(y.len() - 1);
    let hi = t.min(x.len() - 1);
    if lo > hi {
        return 0.0;
    }
    (lo..=hi).map(|i| x[i] * y[t - i]).sum()
}

/// The part of one closed-loop coefficient that does not involve the selected
/// plant coefficient.
///
/// For `PlantDenominator(τ)` this is `ξ`, with the coefficient of `s^(n+κ-τ)`
/// equal to `α_τ + ξ`. For `PlantNumerator(ι)` it is `ζ`, with the
/// coefficient of `s^(m+ℓ-ι)` equal to `b_0·β_ι + ζ`. Both are evaluated at
/// the plant's current coefficients.
pub fn coefficient_offset(
    controller: &RationalTF,
    plant: &RationalTF,
    which: CoefficientIndex,
) -> Result<f64> {
    check_theorem_form(controller, plant)?;
    which.check(plant)?;
    let a = controller.den.coeffs();
    let b = controller.num.coeffs();
    let alpha = plant.den.coeffs();
    let beta = plant.num.coeffs();
    let (n, m) = (a.len() as i64 - 1, b.len() as i64 - 1);
    let (kappa, ell) = (alpha.len() as i64 - 1, beta.len() as i64 - 1);

    let offset = match which {
        CoefficientIndex::PlantDenominator(tau) => {
            let tau = tau as i64;
            let own: f64 = ((tau - n).max(0)..tau)
                .map(|j| a[(tau - j) as usize] * alpha[j as usize])
                .sum();
            own + conv_at(b, beta, tau + m + ell - (n + kappa))
        }
        CoefficientIndex::PlantNumerator(iota) => {
            let iota = iota as i64;
            let own: f64 = ((iota - m).max(0)..iota)
                .map(|j| b[(iota - j) as usize] * beta[j as usize])
                .sum();
            own + conv_at(a, alpha, iota + n + kappa - (m + ell))
        }
    };
    Ok(offset)
}

/// Returns a copy of `plant` with one coefficient replaced.
pub fn with_plant_coefficient(
    plant: &RationalTF,
    which: CoefficientIndex,
    value: f64,
) -> Result<RationalTF> {
    which.check(plant)?;
    let mut num = plant.num.coeffs.clone();
    let mut den = plant.den.coeffs.clone();
    match which {
        CoefficientIndex::PlantDenominator(t) => den[t] = value,
        CoefficientIndex::PlantNumerator(i) => num[i] = value,
    }
    // Keep the original degree structure even if β_0 becomes zero.
    Ok(RationalTF {
        num: Polynomial { coeffs: num },
        den: Polynomial { coeffs: den },
    })
}

/// Outcome of [`destabilizing_value`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Destabilization {
    pub which: CoefficientIndex,
    /// `ξ` or `ζ`.
    pub offset: f64,
    pub nominal: f64,
    /// Coefficient value that destabilizes the loop.
    pub value: f64,
    pub slack: f64,
    /// `|value - nominal|`; the construction is not minimal.
    pub distance_from_nominal: f64,
    /// Whether `is_hurwitz` rejects the perturbed loop.
    pub verified: bool,
}

/// Default margin past the stability threshold.
pub fn default_slack(threshold: f64) -> f64 {
    1e-3 * (1.0 + threshold.abs())
}

/// Finds a value of one plant coefficient that destabilizes a loop which is
/// stable at the nominal plant.
///
/// The targeted closed-loop coefficient is pushed `slack` past zero, to the
/// sign opposite the nominal leading coefficient. For a strictly proper loop
/// (leading coefficient 1) this gives `α_τ = -ξ - slack` and
/// `β_ι = -ζ/b_0 ∓ slack` depending on the sign of `b_0`.
pub fn destabilizing_value(
    controller: &RationalTF,
    plant: &RationalTF,
    which: CoefficientIndex,
    slack: Option<f64>,
) -> Result<Destabilization> {
    if let Some(s) = slack {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositiveSlack(s));
        }
    }
    let offset = coefficient_offset(controller, plant, which)?;
    let charpoly = closed_loop_charpoly(controller, plant);
    if !is_hurwitz(&charpoly)? {
        return Err(Error::NominalUnstable);
    }
    if charpoly.degree() == 0 {
        return Err(Error::invalid(
            "closed-loop characteristic polynomial is a constant; no coefficient can destabilize it",
        ));
    }
    let lead_sign = charpoly.leading().signum();
    let b0 = controller.num.leading();

    // gain: d(coefficient)/d(plant coefficient); threshold: value where it crosses zero.
    let (nominal, gain, threshold) = match which {
        CoefficientIndex::PlantDenominator(t) => (plant.den.coeffs[t], 1.0, -offset),
        CoefficientIndex::PlantNumerator(i) => (plant.num.coeffs[i], b0, -offset / b0),
    };
    let slack = slack.unwrap_or_else(|| default_slack(threshold));
    // Move the coefficient to sign -lead_sign: direction in plant-coefficient space.
    let direction = -lead_sign * gain.signum();
    let value = threshold + direction * slack;

    let perturbed = with_plant_coefficient(plant, which, value)?;
    let verified = !is_hurwitz(&closed_loop_charpoly(controller, &perturbed))?;
    Ok(Destabilization {
        which,
        offset,
        nominal,
        value,
        slack,
        distance_from_nominal: (value - nominal).abs(),
        verified,
    })
}
