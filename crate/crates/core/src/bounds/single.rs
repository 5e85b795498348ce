//! Rate from the count in the single best sub-interval, with the input
//! density `f(x) ∝ x^{-1/2} e^{-μx/M}` on `[0, M]`.

use std::f64::consts::{E, PI};

use super::{harmonic_scale, reference_penalty, BoundConfig, ConstraintSet, Rate};
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};
use crate::specfun::{erf, erfi, FRAC_2_SQRT_PI, SQRT_PI};

const SERIES_RADIUS: f64 = 1.0;
// e^{-μ} overflows a little beyond this.
const MU_FLOOR: f64 = -700.0;
const MU_CEIL: f64 = 1e15;

/// `G(μ) = erf(√μ)/√μ`, continued analytically to `μ ≤ 0`
/// (`G(0) = 2/√π`, `G(μ) = erfi(√−μ)/√−μ` for `μ < 0`).
///
/// `√π·G(μ) = ∫₀¹ t^{-1/2} e^{-μt} dt`.
pub fn g_mu(mu: f64) -> f64 {
    if mu.abs() < SERIES_RADIUS {
        FRAC_2_SQRT_PI * moment_series(mu, 1.0)
    } else if mu > 0.0 {
        let s = mu.sqrt();
        erf(s) / s
    } else {
        let s = (-mu).sqrt();
        erfi(s) / s
    }
}

/// Σ_k (−μ)^k / (k! (2k + offset))
fn moment_series(mu: f64, offset: f64) -> f64 {
    let mut power = 1.0;
    let mut sum = 1.0 / offset;
    for k in 1..200 {
        power *= -mu / k as f64;
        let term = power / (2.0 * k as f64 + offset);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `E[X]/M` under the input density for a given `μ`:
/// `1/(2μ) − e^{−μ}/(√π μ G(μ))`, equal to 1/3 at `μ = 0` and
/// strictly decreasing from 1 to 0 over the real line.
pub fn alpha_of_mu(mu: f64) -> f64 {
    if mu.abs() < SERIES_RADIUS {
        return moment_series(mu, 3.0) / moment_series(mu, 1.0);
    }
    1.0 / (2.0 * mu) - (-mu).exp() / (SQRT_PI * mu * g_mu(mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRoot {
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds `μ` with `alpha_of_mu(μ) = alpha`. Any `alpha` in `(0, 1)` has a
/// unique root; negative roots correspond to `alpha > 1/3`.
pub fn solve_mu(alpha: f64, tol: f64) -> Result<MuRoot> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Infeasible(format!(
            "peak-to-average ratio alpha = {alpha} is outside (0, 1)"
        )));
    }
    let f = |mu: f64| alpha_of_mu(mu) - alpha;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > MU_CEIL {
            return Err(Error::Infeasible(format!(
                "alpha = {alpha} is too close to 0"
            )));
        }
    }
    while f(lo) < 0.0 {
        lo *= 2.0;
        if lo < MU_FLOOR {
            return Err(Error::Infeasible(format!(
                "alpha = {alpha} is too close to 1"
            )));
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let r = f(mid);
        if r.abs() <= 0.5 * tol || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            let residual = r.abs();
            if residual > tol {
                return Err(Error::Solver(format!(
                    "mu bisection stalled at {mid} with residual {residual:e}"
                )));
            }
            return Ok(MuRoot {
                mu: mid,
                residual,
                iterations,
            });
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Upper bound on `E[ln(1 + 1/(12 p X))]` under the input density, obtained
/// by dropping the factor `e^{−μx/M}` from the integrand.
pub fn explog_correction(p_star_i: f64, peak: f64, mu: f64) -> f64 {
    assert!(p_star_i > 0.0 && peak > 0.0, "need p > 0 and M > 0");
    let am = 12.0 * p_star_i * peak;
    let root = am.sqrt();
    (4.0 * root.atan() / root + 2.0 * (1.0 / am).ln_1p()) / (SQRT_PI * g_mu(mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lb1 {
    pub rate: Rate,
    /// Maximising sub-interval, 1-based.
    pub interval: usize,
    pub mu: MuRoot,
}

/// Best single-interval rate, maximised over sub-intervals whose row has no
/// zero arrival probability. Ties go to the earlier sub-interval.
pub fn lower_bound_1(a: &ArrivalMatrix, cons: &ConstraintSet, cfg: &BoundConfig) -> Result<Lb1> {
    cfg.validate()?;
    let mu = solve_mu(cons.alpha(), cfg.root_tol)?;
    let eta = cfg.eta_for(cons);
    let peak = cons.peak;
    let common = (a.releases() as f64).ln()
        + (PI * peak).sqrt().ln()
        + g_mu(mu.mu).ln()
        + cons.alpha() * mu.mu
        - reference_penalty(cons, eta, a.releases())
        - 0.5 * (2.0 * PI * E).ln();
    let mut best: Option<(f64, usize)> = None;
    for i in 1..=a.intervals() {
        let Some(k) = harmonic_scale(a.row(i)) else {
            continue;
        };
        let p = a.row_max(i);
        let r = common
            - (eta * p).ln()
            - k.ln()
            - 0.5 * p.ln()
            - 0.5 * explog_correction(p, peak, mu.mu);
        if best.is_none_or(|(b, _)| r > b) {
            best = Some((r, i));
        }
    }
    let (r, interval) = best
        .ok_or_else(|| Error::Infeasible("every sub-interval misses some release time".into()))?;
    Ok(Lb1 {
        rate: Rate(r),
        interval,
        mu,
    })
}
