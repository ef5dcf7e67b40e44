//! First-order plant `G(s) = q/(s - p)` with independent Gaussian parameters
//! `p ~ N(p0, σp)`, `q ~ N(q0, σq)`, and two candidate controllers:
//!
//! * `C_A = K_A/(s + a)`: stable iff `p < a` and `p < (K_A/a)·q`. With
//!   `r < ρ_A` it stabilizes the whole box `B(r)` (the worst-case design).
//! * `C_B = K_B`: stable iff `p < K_B·q`. With `ρ_B < r` part of the box is
//!   lost (the probabilistic design).
//!
//! Everything here is closed form except [`prob_instability_a`], which
//! reduces a bivariate Gaussian mass to two one-dimensional polar integrals.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_quad::{erf_unchecked, erfc, integrate, polar_kernel};

/// Parameters of the first-order scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderCase {
    /// Pole of `C_A`.
    pub a: f64,
    pub k_a: f64,
    pub k_b: f64,
    /// Mean of `p`.
    pub p0: f64,
    /// Mean of `q`.
    pub q0: f64,
    pub sigma_p: f64,
    pub sigma_q: f64,
    /// Half-width of the uncertainty box `B(r)`.
    pub r: f64,
}

impl FirstOrderCase {
    /// Row 1 of `riskcal table1`: a=10, r=17, p0=-10, q0=20, σp=10, σq=5, K_A=30, K_B=2.
    pub const ROW1: FirstOrderCase = FirstOrderCase {
        a: 10.0,
        k_a: 30.0,
        k_b: 2.0,
        p0: -10.0,
        q0: 20.0,
        sigma_p: 10.0,
        sigma_q: 5.0,
        r: 17.0,
    };

    /// Row 2 of `riskcal table1`: a=40, r=49, p0=-10, q0=50, σp=20, σq=10, K_A=4000, K_B=10.
    pub const ROW2: FirstOrderCase = FirstOrderCase {
        a: 40.0,
        k_a: 4000.0,
        k_b: 10.0,
        p0: -10.0,
        q0: 50.0,
        sigma_p: 20.0,
        sigma_q: 10.0,
        r: 49.0,
    };

    /// Checks the scenario's standing assumptions. The error message names
    /// the first violated inequality.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a", self.a),
            ("K_A", self.k_a),
            ("K_B", self.k_b),
            ("p0", self.p0),
            ("q0", self.q0),
            ("sigma_p", self.sigma_p),
            ("sigma_q", self.sigma_q),
            ("r", self.r),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite")));
        }
        let checks = [
            (self.a > 0.0, "a > 0"),
            (self.k_a > 0.0, "K_A > 0"),
            (self.sigma_p > 0.0, "sigma_p > 0"),
            (self.sigma_q > 0.0, "sigma_q > 0"),
            (self.r > 0.0, "r > 0"),
            (self.p0 < 0.0, "p0 < 0"),
            (self.q0 > 0.0, "q0 > 0"),
            (self.k_b > 1.0, "1 < K_B"),
            (self.k_b < self.k_a / self.a, "K_B < K_A/a"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, rule)) => Err(Error::invalid(format!("violated {rule}"))),
            None => Ok(()),
        }
    }

    /// Slope `K_A/a` of the `C_A` boundary line `p = (K_A/a)·q`.
    pub fn ka_over_a(&self) -> f64 {
        self.k_a / self.a
    }

    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }
}

pub fn stable_a(p: f64, q: f64, case: &FirstOrderCase) -> bool {
    p < case.a && p < case.ka_over_a() * q
}

pub fn stable_b(p: f64, q: f64, case: &FirstOrderCase) -> bool {
    p < case.k_b * q
}

/// Deterministic stability margins: the largest box radii each controller
/// stabilizes entirely.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub rho_a: f64,
    pub rho_b: f64,
    /// Radius at which the unstable region of `C_B` starts cutting the
    /// box's lower edge.
    pub rho_b_star: f64,
    /// `ρ_B < r < ρ_A`: `C_B` may fail inside the box while `C_A` cannot.
    pub b_may_fail_while_a_robust: bool,
}

pub fn margins(case: &FirstOrderCase) -> Margins {
    let FirstOrderCase {
        a,
        k_a,
        k_b,
        p0,
        q0,
        r,
        ..
    } = *case;
    let rho_a = ((k_a * q0 - a * p0) / (k_a + a)).min(a - p0);
    let rho_b = (k_b * q0 - p0) / (k_b + 1.0);
    let rho_b_star = (k_b * q0 - p0) / (k_b - 1.0);
    Margins {
        rho_a,
        rho_b,
        rho_b_star,
        b_may_fail_while_a_robust: rho_b < r && r < rho_a,
    }
}

/// Gaussian mass of the box `B(r)`.
pub fn coverage_probability(case: &FirstOrderCase) -> f64 {
    let z = case.r * FRAC_1_SQRT_2;
    erf_unchecked(z / case.sigma_p) * erf_unchecked(z / case.sigma_q)
}

/// Fraction of the box area on which `C_B` stabilizes (1 for `r < ρ_B`).
pub fn stable_fraction(case: &FirstOrderCase) -> f64 {
    let FirstOrderCase { k_b, p0, q0, r, .. } = *case;
    let m = margins(case);
    if r < m.rho_b {
        1.0
    } else if r <= m.rho_b_star {
        let h = r + (p0 + r) / k_b - q0;
        1.0 - k_b * h * h / (8.0 * r * r)
    } else {
        0.5 - (p0 / k_b - q0) / (2.0 * r)
    }
}

/// Fraction of the box area on which `C_B` fails, `1 - stable_fraction`.
pub fn instability_fraction(case: &FirstOrderCase) -> f64 {
    1.0 - stable_fraction(case)
}

/// Standardized geometry of the `C_A` stability region.
///
/// In `x = (q - q0)/σq`, `y = (p - p0)/σp` the region is `y < u ∧ y < k·x + v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarAuxiliaries {
    pub u: f64,
    pub v: f64,
    pub k: f64,
    /// Distance from the origin to the line `y = k·x + v`.
    pub w: f64,
    /// Polar angle at which the two boundary lines meet, in `(0, π)`.
    pub theta_star: f64,
}

impl PolarAuxiliaries {
    /// Requires `u > 0`, `v > 0`, `k > 0`.
    pub fn from_standardized(u: f64, v: f64, k: f64) -> Result<Self> {
        if !(u > 0.0 && v > 0.0 && k > 0.0) || !(u.is_finite() && v.is_finite() && k.is_finite()) {
            return Err(Error::invalid(format!(
                "polar auxiliaries need finite u > 0, v > 0, k > 0 (got u={u}, v={v}, k={k})"
            )));
        }
        Ok(Self {
            u,
            v,
            k,
            w: v / (1.0 + k * k).sqrt(),
            theta_star: theta_star(u, v, k),
        })
    }

    pub fn from_case(case: &FirstOrderCase) -> Result<Self> {
        let u = (case.a - case.p0) / case.sigma_p;
        let v = (case.ka_over_a() * case.q0 - case.p0) / case.sigma_p;
        let k = case.ka_over_a() * case.sigma_q / case.sigma_p;
        Self::from_standardized(u, v, k)
    }
}

/// Angle of the corner `(x, y)` where `y = u` meets `y = k·x + v`, mapped
/// into `(0, π)`: principal arctangent when `u > v`, shifted by `π` when
/// `u < v`, exactly `π/2` when `u = v` (to 1e-12 relative).
pub fn theta_star(u: f64, v: f64, k: f64) -> f64 {
    if (u - v).abs() <= 1e-12 * u.abs().max(v.abs()) {
        FRAC_PI_2
    } else {
        let t = (k * u / (u - v)).atan();
        if u > v {
            t
        } else {
            t + PI
        }
    }
}

/// Standard bivariate normal mass of `{y ≥ u} ∪ {y ≥ k·x + v}` with its
/// quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarMass {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub aux: PolarAuxiliaries,
}

/// Evaluates `(1/2π)[∫₀^θ* e^{-u²/2sin²θ} dθ + ∫_{θ*-atan k}^π e^{-w²/2sin²θ} dθ]`
/// to absolute tolerance `tol`.
pub fn complement_mass(aux: &PolarAuxiliaries, tol: f64) -> Result<PolarMass> {
    // Split the budget: Î error ≤ 2π·tol.
    let part_tol = PI * tol;
    let u = aux.u;
    let w = aux.w;
    let first = integrate(|t| polar_kernel(u, t), 0.0, aux.theta_star, part_tol)?;
    let lower = (aux.theta_star - aux.k.atan()).max(0.0);
    let second = integrate(|t| polar_kernel(w, t), lower, PI, part_tol)?;
    let scale = 1.0 / (2.0 * PI);
    Ok(PolarMass {
        value: (first.value + second.value) * scale,
        abs_error_estimate: (first.abs_error_estimate + second.abs_error_estimate) * scale,
        evaluations: first.evaluations + second.evaluations,
        aux: *aux,
    })
}

/// Probability that `C_A` fails to stabilize the Gaussian plant, with the
/// auxiliaries and quadrature diagnostics.
pub fn prob_instability_a_detailed(case: &FirstOrderCase, tol: f64) -> Result<PolarMass> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let aux = PolarAuxiliaries::from_case(case)?;
    complement_mass(&aux, tol)
}

pub fn prob_instability_a(case: &FirstOrderCase, tol: f64) -> Result<f64> {
    prob_instability_a_detailed(case, tol).map(|m| m.value)
}

/// Probability that `C_B` fails: `½ erfc((K_B q0 - p0)/√(2(σp² + K_B²σq²)))`,
/// i.e. `½ - ½ erf(·)` evaluated without cancellation in the tail.
pub fn prob_instability_b(case: &FirstOrderCase) -> f64 {
    let FirstOrderCase {
        k_b,
        p0,
        q0,
        sigma_p,
        sigma_q,
        ..
    } = *case;
    let spread = (2.0 * (sigma_p * sigma_p + k_b * k_b * sigma_q * sigma_q)).sqrt();
    0.5 * erfc((k_b * q0 - p0) / spread)
}

/// Both sides of the sufficient condition for `P^{C_A} > P^{C_B}`:
/// `1 + (K_B σq/σp)² < ((K_B q0 - p0)/(a - p0))²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficientCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn sufficient_condition(case: &FirstOrderCase) -> Result<SufficientCondition> {
    let FirstOrderCase {
        a,
        k_b,
        p0,
        q0,
        sigma_p,
        sigma_q,
        ..
    } = *case;
    if a.is_nan() || p0.is_nan() || a <= p0 {
        return Err(Error::invalid("violated a > p0"));
    }
    let ratio = k_b * sigma_q / sigma_p;
    let lhs = 1.0 + ratio * ratio;
    let gap = (k_b * q0 - p0) / (a - p0);
    let rhs = gap * gap;
    Ok(SufficientCondition {
        lhs,
        rhs,
        holds: lhs < rhs,
    })
}

/// The curves drawn in the stability-boundary picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `p = K_B·q`
    KbLine,
    /// `p = (K_A/a)·q`
    KaLine,
    /// `p = a`
    ALine,
    /// Perimeter of `B(r)`, closed.
    Box,
    /// One-sigma ellipse of the parameter law.
    SigmaEllipse1,
    SigmaEllipse2,
}

impl SeriesKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesKind::KbLine => "kb_line",
            SeriesKind::KaLine => "ka_line",
            SeriesKind::ALine => "a_line",
            SeriesKind::Box => "box",
            SeriesKind::SigmaEllipse1 => "sigma_ellipse_1",
            SeriesKind::SigmaEllipse2 => "sigma_ellipse_2",
        }
    }

    fn color(self) -> &'static str {
        match self {
            SeriesKind::KbLine => "#d62728",
            SeriesKind::KaLine => "#1f77b4",
            SeriesKind::ALine => "#2ca02c",
            SeriesKind::Box => "#000000",
            SeriesKind::SigmaEllipse1 | SeriesKind::SigmaEllipse2 => "#7f7f7f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub kind: SeriesKind,
    /// `(q, p)` pairs.
    pub points: Vec<(f64, f64)>,
}

/// Polylines for the `(q, p)` plane over the window `q0 ± 2r`, `p0 ± 2r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDataset {
    pub q_range: (f64, f64),
    pub p_range: (f64, f64),
    pub series: Vec<Series>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

pub fn boundary_dataset(
    case: &FirstOrderCase,
    points_per_segment: usize,
    with_ellipses: bool,
) -> Result<BoundaryDataset> {
    if points_per_segment < 2 {
        return Err(Error::invalid("points_per_segment must be at least 2"));
    }
    let n = points_per_segment;
    let FirstOrderCase {
        a,
        k_b,
        p0,
        q0,
        r,
        sigma_p,
        sigma_q,
        ..
    } = *case;
    let q_range = (q0 - 2.0 * r, q0 + 2.0 * r);
    let p_range = (p0 - 2.0 * r, p0 + 2.0 * r);
    let slope_a = case.ka_over_a();

    let line = |f: &dyn Fn(f64) -> f64| {
        linspace(q_range.0, q_range.1, n)
            .map(|q| (q, f(q)))
            .collect()
    };
    let mut series = vec![
        Series {
            kind: SeriesKind::KbLine,
            points: line(&|q| k_b * q),
        },
        Series {
            kind: SeriesKind::KaLine,
            points: line(&|q| slope_a * q),
        },
        Series {
            kind: SeriesKind::ALine,
            points: line(&|_| a),
        },
    ];

    let corners = [
        (q0 - r, p0 - r),
        (q0 + r, p0 - r),
        (q0 + r, p0 + r),
        (q0 - r, p0 + r),
        (q0 - r, p0 - r),
    ];
    let mut perimeter = Vec::with_capacity(4 * (n - 1) + 1);
    for side in corners.windows(2) {
        let (from, to) = (side[0], side[1]);
        perimeter.extend(linspace(0.0, 1.0, n).take(n - 1).map(|t| {
            // Pin the constant coordinate so points lie exactly on the side.
            let q = if from.0 == to.0 {
                from.0
            } else {
                from.0 + t * (to.0 - from.0)
            };
            let p = if from.1 == to.1 {
                from.1
            } else {
                from.1 + t * (to.1 - from.1)
            };
            (q, p)
        }));
    }
    perimeter.push(corners[0]);
    series.push(Series {
        kind: SeriesKind::Box,
        points: perimeter,
    });

    if with_ellipses {
        for (kind, scale) in [
            (SeriesKind::SigmaEllipse1, 1.0),
            (SeriesKind::SigmaEllipse2, 2.0),
        ] {
            let m = 4 * (n - 1) + 1;
            let mut points: Vec<(f64, f64)> = linspace(0.0, 2.0 * PI, m)
                .map(|t| {
                    (
                        q0 + scale * sigma_q * t.cos(),
                        p0 + scale * sigma_p * t.sin(),
                    )
                })
                .collect();
            points[m - 1] = points[0];
            series.push(Series { kind, points });
        }
    }
    Ok(BoundaryDataset {
        q_range,
        p_range,
        series,
    })
}

impl BoundaryDataset {
    pub fn get(&self, kind: SeriesKind) -> Option<&Series> {
        self.series.iter().find(|s| s.kind == kind)
    }

    /// CSV with header `series,q,p`, one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("series,q,p\n");
        for s in &self.series {
            for (q, p) in &s.points {
                let _ = writeln!(out, "{},{},{}", s.kind.as_str(), q, p);
            }
        }
        out
    }

    /// Static SVG overlay of all series, clipped to the plot window.
    pub fn to_svg(&self, width: u32, height: u32) -> String {
        let (w, h) = (f64::from(width), f64::from(height));
        let margin = 40.0;
        let (q_lo, q_hi) = self.q_range;
        let (p_lo, p_hi) = self.p_range;
        let sx = |q: f64| margin + (q - q_lo) / (q_hi - q_lo) * (w - 2.0 * margin);
        let sy = |p: f64| h - margin - (p - p_lo) / (p_hi - p_lo) * (h - 2.0 * margin);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
        );
        let _ = writeln!(
            svg,
            r#"<defs><clipPath id="window"><rect x="{margin}" y="{margin}" width="{}" height="{}"/></clipPath></defs>"#,
            w - 2.0 * margin,
            h - 2.0 * margin
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r##"<rect x="{margin}" y="{margin}" width="{}" height="{}" fill="none" stroke="#cccccc"/>"##,
            w - 2.0 * margin,
            h - 2.0 * margin
        );
        let _ = writeln!(
            svg,
            r#"<g clip-path="url(#window)" fill="none" stroke-width="1.5">"#
        );
        for s in &self.series {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(q, p)| format!("{:.2},{:.2}", sx(q), sy(p)))
                .collect();
            let dash = match s.kind {
                SeriesKind::SigmaEllipse1 | SeriesKind::SigmaEllipse2 => {
                    r#" stroke-dasharray="4 3""#
                }
                _ => "",
            };
            let _ = writeln!(
                svg,
                r#"<polyline id="{}" stroke="{}"{} points="{}"/>"#,
                s.kind.as_str(),
                s.kind.color(),
                dash,
                pts.join(" ")
            );
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">q</text>"#,
            w / 2.0,
            h - 10.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="12" y="{}" font-size="12" text-anchor="middle">p</text>"#,
            h / 2.0
        );
        svg.push_str("</svg>\n");
        svg
    }
}
