mod common;

use common::criteria::*;
use jtac::specfun::*;
use jtac_oracle::series;
use proptest::prelude::*;

#[test]
fn oracle_grids() {
    if let Err(e) = special_functions() {
        panic!("{e}");
    }
}

#[test]
fn reference_values() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(1.0) - 0.842_700_792_9).abs() < 1e-10);
    assert!((erf(-1.0) + 0.842_700_792_9).abs() < 1e-10);
    assert!((expint_ei(1.0).unwrap() - 1.895_117_816_4).abs() < 1e-9);
    assert!((expint_ei(-1.0).unwrap() + 0.219_383_934_4).abs() < 1e-9);
    assert_eq!(hyp2f2_half(0.0).unwrap(), 1.0);
    assert_eq!(poisson_entropy(0.0), 0.0);
}

#[test]
fn ei_near_zero_follows_log() {
    let x: f64 = 1e-4;
    let approx = EULER_GAMMA + x.ln();
    assert!(((expint_ei(x).unwrap() - approx) / approx).abs() <= 1e-3);
}

#[test]
fn ei_difference_matches_quadrature() {
    for &(a, b) in &[(0.5, 2.0), (1.0, 10.0), (3.0, 40.0), (20.0, 60.0)] {
        let got = expint_ei(b).unwrap() - expint_ei(a).unwrap();
        let want = jtac_oracle::integrate(|t: f64| t.exp() / t, a, b, 1e-300, 1e-14);
        assert!(
            ((got - want) / want).abs() <= 1e-9,
            "[{a}, {b}]: {got} vs {want}"
        );
    }
}

#[test]
fn hyp2f2_lies_between_partial_sums() {
    for &x in &[-0.5, -1.0, -2.0] {
        let v = hyp2f2_half(x).unwrap();
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut prev = f64::NAN;
        for k in 0..40 {
            let d = (2 * k + 1) as f64;
            prev = sum;
            sum += power / (d * d);
            power *= x / (k + 1) as f64;
        }
        assert!((v - sum).abs() <= (sum - prev).abs().max(1e-15));
    }
}

#[test]
fn hyp2f2_integral_identity() {
    // ∫₀^M ln t e^{−t²/u} dt = N ln M − M ₂F₂(−M²/u), N = √(πu)/2 erf(M/√u)
    let (peak, u) = (2.0f64, 1.0f64);
    let lhs = jtac_oracle::integrate(
        |t: f64| t.ln() * (-t * t / u).exp(),
        0.0,
        peak,
        1e-300,
        1e-13,
    );
    let s = peak / u.sqrt();
    let n = 0.5 * (std::f64::consts::PI * u).sqrt() * erf(s);
    let rhs = n * peak.ln() - peak * hyp2f2_half(-s * s).unwrap();
    assert!(((lhs - rhs) / rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
}

#[test]
fn gaussian_moments_match_hermite() {
    assert_eq!(gaussian_noncentral_moment(0, 3.0, 2.0), 1.0);
    assert_eq!(gaussian_noncentral_moment(2, 0.0, 2.5), 2.5);
    let want = gaussian_moment_by_hermite(4, 1.0, 2.0);
    let got = gaussian_noncentral_moment(4, 1.0, 2.0);
    assert!(((got - want) / want).abs() <= 1e-10, "{got} vs {want}");
    for k in 0..12 {
        assert_eq!(
            gaussian_noncentral_moment(k, 1.5, 0.0),
            1.5f64.powi(k as i32)
        );
    }
}

#[test]
fn ln_factorial_matches_sum() {
    for n in [0u64, 1, 5, 20, 170, 171, 1000, 100_000] {
        let want = series::ln_factorial(n);
        assert!(
            (ln_factorial(n) - want).abs() <= 1e-9 * want.max(1.0),
            "{n}"
        );
    }
}

proptest! {
    #[test]
    fn erf_is_odd_and_bounded(x in -8.0f64..8.0) {
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert!(erf(x).abs() <= 1.0);
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erf_is_increasing(x in -5.0f64..5.0, dx in 1e-3f64..1.0) {
        prop_assert!(erf(x + dx) >= erf(x));
    }

    #[test]
    fn ei_is_increasing(x in 1e-3f64..600.0, dx in 1e-3f64..1.0) {
        prop_assert!(expint_ei(x + dx).unwrap() > expint_ei(x).unwrap());
    }

    #[test]
    fn poisson_entropy_is_nonnegative(lambda in 0.0f64..500.0) {
        prop_assert!(poisson_entropy(lambda) >= 0.0);
    }
}
