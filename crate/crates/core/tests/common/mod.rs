//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riskcal::case_study::{margins, FirstOrderCase};
use riskcal::poly_stability::{closed_loop_charpoly, is_hurwitz, Polynomial, RationalTF};
use riskcal::risk_model::RiskScenario;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest real part among the roots of `coeffs` (descending powers),
/// from the eigenvalues of the companion matrix. `-inf` for constants.
pub fn max_real_root(coeffs: &[f64]) -> f64 {
    let first = coeffs
        .iter()
        .position(|&c| c != 0.0)
        .expect("nonzero polynomial");
    let c = &coeffs[first..];
    let deg = c.len() - 1;
    if deg == 0 {
        return f64::NEG_INFINITY;
    }
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        m[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random polynomial of degree `deg` in one of three flavours: signed
/// uniform coefficients, positive coefficients, or expanded from random
/// roots (which lands many cases near the stability boundary).
pub fn random_polynomial(rng: &mut impl Rng, deg: usize) -> Vec<f64> {
    match rng.random_range(0..3) {
        0 => (0..=deg).map(|_| rng.random_range(-10.0..10.0)).collect(),
        1 => (0..=deg).map(|_| rng.random_range(0.0..10.0)).collect(),
        _ => {
            let mut poly = vec![rng.random_range(0.5..3.0)];
            let mut left = deg;
            while left > 0 {
                if left >= 2 && rng.random_bool(0.5) {
                    let re: f64 = rng.random_range(-3.0..1.0);
                    let im: f64 = rng.random_range(0.1..3.0);
                    poly = convolve(&poly, &[1.0, -2.0 * re, re * re + im * im]);
                    left -= 2;
                } else {
                    let re: f64 = rng.random_range(-3.0..1.0);
                    poly = convolve(&poly, &[1.0, -re]);
                    left -= 1;
                }
            }
            poly
        }
    }
}

pub fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn random_coeffs(rng: &mut impl Rng, len: usize, monic: bool) -> Vec<f64> {
    (0..len)
        .map(|i| {
            if i == 0 && monic {
                1.0
            } else if rng.random_bool(0.85) {
                rng.random_range(0.1..6.0)
            } else {
                rng.random_range(-3.0..3.0)
            }
        })
        .collect()
}

/// Random proper controller and plant with monic denominators whose closed
/// loop is Hurwitz and of degree at least one.
pub fn random_stable_loop(rng: &mut impl Rng) -> (RationalTF, RationalTF) {
    loop {
        let n = rng.random_range(0..=2usize);
        let m = rng.random_range(0..=n);
        let kappa = rng.random_range(1..=3usize);
        let ell = rng.random_range(0..=kappa);
        let mut cnum = random_coeffs(rng, m + 1, false);
        if cnum[0].abs() < 0.05 {
            cnum[0] = 0.5;
        }
        let mut pnum = random_coeffs(rng, ell + 1, false);
        if pnum[0].abs() < 0.05 {
            pnum[0] = 0.5;
        }
        let controller = RationalTF::from_coeffs(&cnum, &random_coeffs(rng, n + 1, true)).unwrap();
        let plant = RationalTF::from_coeffs(&pnum, &random_coeffs(rng, kappa + 1, true)).unwrap();
        let cp = closed_loop_charpoly(&controller, &plant);
        if cp.degree() >= 1 && is_hurwitz(&cp).unwrap() {
            return (controller, plant);
        }
    }
}

/// Random proper pair with monic denominators; stability not required.
pub fn random_loop(rng: &mut impl Rng) -> (RationalTF, RationalTF) {
    let n = rng.random_range(0..=3usize);
    let m = rng.random_range(0..=n);
    let kappa = rng.random_range(1..=4usize);
    let ell = rng.random_range(0..=kappa);
    let mut signed = |len: usize, monic: bool| -> Vec<f64> {
        (0..len)
            .map(|i| {
                if i == 0 && monic {
                    1.0
                } else {
                    rng.random_range(-10.0..10.0)
                }
            })
            .collect()
    };
    let (cnum, cden, pnum, pden) = (
        signed(m + 1, false),
        signed(n + 1, true),
        signed(ell + 1, false),
        signed(kappa + 1, true),
    );
    (
        RationalTF::new(
            Polynomial::new(cnum).unwrap(),
            Polynomial::new(cden).unwrap(),
        )
        .unwrap(),
        RationalTF::new(
            Polynomial::new(pnum).unwrap(),
            Polynomial::new(pden).unwrap(),
        )
        .unwrap(),
    )
}

/// Which stable-fraction branch a random case should land in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Inside,
    Corner,
    Strip,
}

/// Random valid case with `r` chosen in the requested branch.
pub fn random_case(rng: &mut impl Rng, branch: Branch) -> FirstOrderCase {
    let k_b = rng.random_range(1.1..6.0);
    let a = rng.random_range(1.0..40.0);
    let case = FirstOrderCase {
        a,
        k_a: a * k_b * rng.random_range(1.2..20.0),
        k_b,
        p0: rng.random_range(-30.0..-0.5),
        q0: rng.random_range(0.5..50.0),
        sigma_p: rng.random_range(0.5..25.0),
        sigma_q: rng.random_range(0.5..15.0),
        r: 1.0,
    };
    let m = margins(&case);
    let r = match branch {
        Branch::Inside => m.rho_b * rng.random_range(0.05..0.999),
        Branch::Corner => m.rho_b + (m.rho_b_star - m.rho_b) * rng.random_range(0.001..0.999),
        Branch::Strip => m.rho_b_star * rng.random_range(1.001..4.0),
    };
    let case = case.with_r(r);
    case.validate().expect("generator produces valid cases");
    case
}

/// Midpoint-grid fraction of `B(r)` on which `pred` holds.
pub fn grid_fraction(case: &FirstOrderCase, n: usize, pred: impl Fn(f64, f64) -> bool) -> f64 {
    let h = 2.0 * case.r / n as f64;
    let mut hits = 0usize;
    for i in 0..n {
        let p = case.p0 - case.r + (i as f64 + 0.5) * h;
        for j in 0..n {
            let q = case.q0 - case.r + (j as f64 + 0.5) * h;
            hits += usize::from(pred(p, q));
        }
    }
    hits as f64 / (n * n) as f64
}

pub fn random_scenario(rng: &mut impl Rng) -> RiskScenario {
    let pr_m: f64 = rng.random();
    let pr_e = rng.random::<f64>() * (1.0 - pr_m);
    let (vpm, vpe, vwe) = (unit(rng), unit(rng), unit(rng));
    RiskScenario::new(pr_m, pr_e, vpm, vpe, vwe).unwrap()
}

// Uniform on [0, 1] with extra weight on 0, 1 and small values.
fn unit(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..5) {
        0 => 0.0,
        1 => 1.0,
        2 => rng.random::<f64>() * 1e-3,
        _ => rng.random(),
    }
}
