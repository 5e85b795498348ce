use super::{erfc, SeriesControl, EULER_GAMMA, SQRT_PI};
use crate::error::{Error, Result};

// For x < −SERIES_FLOOR the alternating series loses more than ~4 digits to
// cancellation, so the erf-integral representation takes over.
const SERIES_FLOOR: f64 = 12.0;

/// ₂F₂(½,½; 3/2,3/2; x) with the default series control.
pub fn hyp2f2_half(x: f64) -> Result<f64> {
    hyp2f2_half_with(x, SeriesControl::default())
}

/// ₂F₂(½,½; 3/2,3/2; x) = Σ_k x^k / (k! (2k+1)²).
///
/// For x < −12 the identity ₂F₂(…; −z²) = (√π / 2z) ∫₀^z erf(t)/t dt is
/// used, with ∫₀^z erf(t)/t dt = ln(2z) + γ/2 + ∫_z^∞ erfc(t)/t dt.
pub fn hyp2f2_half_with(x: f64, ctl: SeriesControl) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func: "hyp2f2_half",
            arg: x,
            reason: "not finite",
        });
    }
    if x < -SERIES_FLOOR {
        let z = (-x).sqrt();
        let integral = (2.0 * z).ln() + 0.5 * EULER_GAMMA + erfc_over_t_tail(z);
        return Ok(SQRT_PI / (2.0 * z) * integral);
    }
    let mut power = 1.0;
    let mut sum = 1.0;
    for k in 1..ctl.max_terms() {
        power *= x / k as f64;
        let d = (2 * k + 1) as f64;
        let term = power / (d * d);
        sum += term;
        if term.abs() <= ctl.rel_tol() * 1e-3 * sum.abs() {
            return Ok(sum);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::Convergence {
        func: "hyp2f2_half",
        terms: ctl.max_terms(),
    })
}

/// ∫_z^∞ erfc(t)/t dt for z ≥ √12, by composite Simpson on [z, z + 8]
/// (the integrand is below e^{−(z+8)²} beyond).
fn erfc_over_t_tail(z: f64) -> f64 {
    const PANELS: usize = 800;
    let h = 8.0 / PANELS as f64;
    let f = |t: f64| erfc(t) / t;
    let mut s = f(z) + f(z + 8.0);
    for k in 1..PANELS {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(z + k as f64 * h);
    }
    s * h / 3.0
}
