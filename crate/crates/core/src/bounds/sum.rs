//! Rate from the total count followed by the timing information, with the
//! input density `f(x) = c′ e^{φx} / (bx + 1)` on `[0, M]`, `b = 12 p*`.

use std::f64::consts::{E, PI};

use super::{harmonic_scale, reference_penalty, BoundConfig, ConstraintSet, Rate};
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};
use crate::specfun::{expint_ei, poisson_entropy};

// Exponents beyond this overflow Ei or e^{φM}.
const EXPONENT_CAP: f64 = 600.0;
// Below this magnitude Ei differences are taken from the series directly.
const SMALL_ARG: f64 = 2.0;

/// Ei(hi) − Ei(lo) for arguments of equal sign, without cancelling the
/// logarithmic singularity when both are small.
fn ei_diff(hi: f64, lo: f64) -> Result<f64> {
    debug_assert!(hi * lo > 0.0);
    if hi.abs().max(lo.abs()) <= SMALL_ARG {
        let (mut ph, mut pl) = (1.0, 1.0);
        let mut sum = (hi / lo).ln();
        for k in 1..200 {
            ph *= hi / k as f64;
            pl *= lo / k as f64;
            let term = (ph - pl) / k as f64;
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        return Ok(sum);
    }
    Ok(expint_ei(hi)? - expint_ei(lo)?)
}

/// `Z(φ) = ∫₀^M e^{φx}/(bx+1) dx = (e^{−φ/b}/b)(Ei(φM + φ/b) − Ei(φ/b))`.
fn normalizer(phi: f64, b: f64, peak: f64) -> Result<f64> {
    if phi == 0.0 {
        return Ok((b * peak).ln_1p() / b);
    }
    let lo = phi / b;
    let hi = phi * peak + lo;
    Ok((-lo).exp() / b * ei_diff(hi, lo)?)
}

/// `(e^{φM} − 1)/φ`, equal to `M` at `φ = 0`.
fn exp_integral(phi: f64, peak: f64) -> f64 {
    if phi == 0.0 {
        peak
    } else {
        (phi * peak).exp_m1() / phi
    }
}

/// Mean of the density for a given `φ`: `(e^{φM}−1)/(bφZ) − 1/b`.
fn mean_of_phi(phi: f64, b: f64, peak: f64) -> Result<f64> {
    Ok(exp_integral(phi, peak) / (b * normalizer(phi, b, peak)?) - 1.0 / b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiRoot {
    pub phi: f64,
    /// Normalising constant `c′ = 1/Z(φ)`.
    pub c_prime: f64,
    /// Relative mismatch of the two sides of
    /// `Z(φ) = (e^{φM} − 1)/(bφ(E_m + 1/b))`.
    pub residual: f64,
    pub iterations: usize,
}

/// Finds the tilt `φ` that gives the density mean `E_m`.
pub fn solve_phi(cons: &ConstraintSet, p_star: f64, tol: f64) -> Result<PhiRoot> {
    if !(p_star > 0.0) {
        return Err(Error::Infeasible(format!("p* = {p_star} leaves no signal")));
    }
    if cons.mean >= cons.peak {
        return Err(Error::Infeasible(format!(
            "E_m = {} leaves no room below the peak {}",
            cons.mean, cons.peak
        )));
    }
    let (b, peak, target) = (12.0 * p_star, cons.peak, cons.mean);
    let residual = |mean: f64| (mean - target).abs() / (target + 1.0 / b);
    let limit = EXPONENT_CAP / peak.max(1.0 / b);
    let f = |phi: f64| Ok::<f64, Error>(mean_of_phi(phi, b, peak)? - target);

    let (mut lo, mut hi) = (-1.0 / peak, 1.0 / peak);
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > limit {
            return Err(Error::Infeasible(format!(
                "E_m = {target} is too close to the peak {peak} for the tilted density"
            )));
        }
    }
    while f(lo)? > 0.0 {
        lo *= 2.0;
        if -lo > limit {
            return Err(Error::Infeasible(format!(
                "E_m = {target} is too close to zero for the tilted density"
            )));
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let mean = mean_of_phi(mid, b, peak)?;
        let r = residual(mean);
        if r <= 0.5 * tol
            || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1e-300)
            || iterations > 400
        {
            if r > tol {
                return Err(Error::Solver(format!(
                    "phi bisection stalled in [{lo}, {hi}] with residual {r:e}"
                )));
            }
            return Ok(PhiRoot {
                phi: mid,
                c_prime: 1.0 / normalizer(mid, b, peak)?,
                residual: r,
                iterations,
            });
        }
        if mean < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lb2 {
    pub r1: Rate,
    pub r2: Rate,
    pub phi: PhiRoot,
    /// Sub-interval whose minimum arrival probability maximises the Poisson
    /// entropy term, 1-based.
    pub interval: usize,
}

impl Lb2 {
    pub fn best(&self) -> Rate {
        if self.r1.0 >= self.r2.0 {
            self.r1
        } else {
            self.r2
        }
    }
}

/// Both variants of the sum-then-time rate. They differ by the constant
/// `m − ln m − 1`, so `R1 ≥ R2` for every `m`.
pub fn lower_bound_2(a: &ArrivalMatrix, cons: &ConstraintSet, cfg: &BoundConfig) -> Result<Lb2> {
    cfg.validate()?;
    let p_star = a.best_col_sum();
    let phi = solve_phi(cons, p_star, cfg.root_tol)?;
    let k = harmonic_scale(a.col_sums()).ok_or_else(|| {
        Error::Infeasible("some release time never arrives within the symbol".into())
    })?;
    let eta = cfg.eta_for(cons);
    let m = a.releases() as f64;

    let mut interval = 1;
    let mut h_best = f64::NEG_INFINITY;
    for i in 1..=a.intervals() {
        let h = poisson_entropy(cons.peak * a.row_min(i));
        if h > h_best {
            h_best = h;
            interval = i;
        }
    }
    let r2 = m.ln()
        - phi.c_prime.ln()
        - phi.phi * cons.mean
        - (eta * p_star).ln()
        - reference_penalty(cons, eta, a.releases())
        - (2.0 * PI * E).ln()
        - k.ln()
        + 12f64.ln()
        + h_best;
    let r1 = r2 + m - m.ln() - 1.0;
    Ok(Lb2 {
        r1: Rate(r1),
        r2: Rate(r2),
        phi,
        interval,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRate {
    pub rate: Rate,
    pub interval: usize,
}

/// Timing increment at a fixed concentration `x`:
/// `ln m + (1/m) Σ_j h(Poisson(p_ij x)) − ln(p_i* x + 1/12)`, maximised over
/// sub-intervals.
///
/// This closed form is an estimate rather than a bound: it can exceed the
/// exact `I(T; Y_i | X = x)`.
pub fn timing_rate_given_x(a: &ArrivalMatrix, x: f64) -> Result<TimingRate> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "concentration must be positive, got {x}"
        )));
    }
    let m = a.releases() as f64;
    let mut best = (f64::NEG_INFINITY, 1);
    for i in 1..=a.intervals() {
        let h: f64 = a
            .row(i)
            .iter()
            .map(|&p| poisson_entropy(p * x))
            .sum::<f64>()
            / m;
        let r = m.ln() + h - (a.row_max(i) * x + 1.0 / 12.0).ln();
        if r > best.0 {
            best = (r, i);
        }
    }
    Ok(TimingRate {
        rate: Rate(best.0),
        interval: best.1,
    })
}
