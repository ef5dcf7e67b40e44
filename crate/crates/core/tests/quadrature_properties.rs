use proptest::prelude::*;

use riskcal::gaussian_quad::{erf, erf_unchecked, erfc, integrate, polar_kernel, DEFAULT_TOL};

fn bump(c: f64) -> impl Fn(f64) -> f64 {
    move |x| (-(x - c) * (x - c)).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn integration_is_linear(alpha in -5.0..5.0f64, beta in -5.0..5.0f64, c in -1.0..3.0f64, lo in -3.0..0.0f64, len in 0.1..6.0f64) {
        let hi = lo + len;
        let f = bump(c);
        let g = |x: f64| (3.0 * x).sin() + x * x;
        let tol = DEFAULT_TOL;
        let combined = integrate(|x| alpha * f(x) + beta * g(x), lo, hi, tol).unwrap().value;
        let separate = alpha * integrate(&f, lo, hi, tol).unwrap().value + beta * integrate(g, lo, hi, tol).unwrap().value;
        // Each integral is within tol of the truth; the scaled errors add up.
        let bound = 2.0 * tol * (1.0 + alpha.abs() + beta.abs());
        prop_assert!((combined - separate).abs() <= bound, "{combined} vs {separate}");
    }

    #[test]
    fn integration_is_additive(c in -1.0..3.0f64, a in -3.0..0.0f64, l1 in 0.0..4.0f64, l2 in 0.0..4.0f64) {
        let (b, cc) = (a + l1, a + l1 + l2);
        let f = bump(c);
        let tol = DEFAULT_TOL;
        let whole = integrate(&f, a, cc, tol).unwrap().value;
        let parts = integrate(&f, a, b, tol).unwrap().value + integrate(&f, b, cc, tol).unwrap().value;
        prop_assert!((whole - parts).abs() <= 2.0 * tol);
    }

    #[test]
    fn erf_is_monotone(mut xs in proptest::collection::vec(-8.0..8.0f64, 2..200)) {
        xs.sort_by(f64::total_cmp);
        for w in xs.windows(2) {
            prop_assert!(erf_unchecked(w[0]) <= erf_unchecked(w[1]), "{} {}", w[0], w[1]);
        }
    }

    #[test]
    fn erf_saturates_beyond_six(x in 6.0..1e6f64) {
        prop_assert!((erf(x).unwrap() - 1.0).abs() <= 1e-15);
        prop_assert!((erf(-x).unwrap() + 1.0).abs() <= 1e-15);
    }

    #[test]
    fn erf_and_erfc_are_complementary(x in -6.0..6.0f64) {
        prop_assert!((erf_unchecked(x) + erfc(x) - 1.0).abs() <= 4e-16);
    }

    #[test]
    fn polar_kernel_vanishes_at_the_endpoints(u in 0.05..20.0f64) {
        prop_assert_eq!(polar_kernel(u, 0.0), 0.0);
        prop_assert_eq!(polar_kernel(u, std::f64::consts::PI), 0.0);
        prop_assert!(polar_kernel(u, 1e-3) <= polar_kernel(u, 1e-2));
        let full = integrate(|t| polar_kernel(u, t), 0.0, std::f64::consts::PI, DEFAULT_TOL).unwrap();
        prop_assert!(full.value.is_finite());
        // (1/2π)∫₀^π exp(-u²/2sin²θ) dθ is the one-sided normal tail Pr{Z > u}.
        let tail = 0.5 * erfc(u / std::f64::consts::SQRT_2);
        prop_assert!((full.value / (2.0 * std::f64::consts::PI) - tail).abs() <= DEFAULT_TOL);
    }
}

#[test]
fn erf_rejects_non_finite() {
    assert!(erf(f64::NAN).is_err());
    assert!(erf(f64::INFINITY).is_err());
}
