//! Rate from the difference of counts in adjacent sub-intervals, with a
//! truncated half-Gaussian input `f(x) ∝ e^{−x²/u}` on `[0, M]`.

use std::f64::consts::{E, PI};

use super::mixture::{mixture_entropy_lower, GaussianComponent, MixtureEntropy};
use super::{harmonic_scale, reference_penalty, BoundConfig, ConstraintSet, Lb3Variant, Rate};
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};
use crate::specfun::{erf, hyp2f2_half, SQRT_PI};

/// Normalised density `e^{−x²/u}/N` on `[0, M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfGaussian {
    pub u: f64,
    pub peak: f64,
    /// `N = (√(πu)/2) erf(M/√u)`.
    pub normalizer: f64,
    /// `|E[X]/M − E_m/M|` at the returned `u`.
    pub residual: f64,
    pub iterations: usize,
}

/// `E[X]/M` as a function of `s = M/√u`; decreases from 1/2 to 0.
fn mean_ratio(s: f64) -> f64 {
    -(-s * s).exp_m1() / (SQRT_PI * s * erf(s))
}

impl HalfGaussian {
    fn from_scale(s: f64, peak: f64, residual: f64, iterations: usize) -> Self {
        let u = (peak / s).powi(2);
        Self {
            u,
            peak,
            normalizer: 0.5 * (PI * u).sqrt() * erf(s),
            residual,
            iterations,
        }
    }

    fn scale(&self) -> f64 {
        self.peak / self.u.sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.peak * mean_ratio(self.scale())
    }

    /// `h(X) = ln N + 1/2 − (M/2) e^{−M²/u} / N`.
    pub fn entropy(&self) -> f64 {
        let s = self.scale();
        self.normalizer.ln() + 0.5 - 0.5 * self.peak * (-s * s).exp() / self.normalizer
    }

    /// `E[ln X] = ln M − M·₂F₂(½,½; 3/2,3/2; −M²/u) / N`.
    pub fn mean_log(&self) -> Result<f64> {
        let s = self.scale();
        Ok(self.peak.ln() - self.peak * hyp2f2_half(-s * s)? / self.normalizer)
    }
}

/// Picks `u` so the truncated half-Gaussian has mean `E_m`. Requires
/// `E_m < M/2`, the mean of the flat limit `u → ∞`.
pub fn solve_u(cons: &ConstraintSet, tol: f64) -> Result<HalfGaussian> {
    let alpha = cons.alpha();
    if alpha >= 0.5 {
        return Err(Error::Infeasible(format!(
            "E_m/M = {alpha} is not below 1/2, the largest mean of a decreasing density"
        )));
    }
    let f = |s: f64| mean_ratio(s) - alpha;
    let (mut lo, mut hi) = (1e-6, 1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Infeasible(format!("E_m/M = {alpha} is too small")));
        }
    }
    if f(lo) < 0.0 {
        return Err(Error::Infeasible(format!(
            "E_m/M = {alpha} is too close to 1/2"
        )));
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let r = f(mid);
        if r.abs() <= 0.5 * tol || hi - lo <= 4.0 * f64::EPSILON * mid {
            if r.abs() > tol {
                return Err(Error::Solver(format!(
                    "u bisection stalled at M/√u = {mid} with residual {:e}",
                    r.abs()
                )));
            }
            return Ok(HalfGaussian::from_scale(
                mid,
                cons.peak,
                r.abs(),
                iterations,
            ));
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lb3 {
    pub rate: Rate,
    /// Maximising sub-interval `i` of the pair `(i−1, i)`.
    pub interval: usize,
    pub density: HalfGaussian,
    /// Part of the rate that does not depend on the sub-interval.
    pub concentration: f64,
    /// Timing part at the maximising sub-interval.
    pub timing: f64,
    pub mixture: MixtureEntropy,
}

/// Adjacent-difference rate maximised over `i = 2..=n`. Pairs where some
/// release gives zero variance are skipped.
pub fn lower_bound_3(a: &ArrivalMatrix, cons: &ConstraintSet, cfg: &BoundConfig) -> Result<Lb3> {
    cfg.validate()?;
    let n = a.intervals();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "adjacent differences need n >= 2".into(),
        ));
    }
    let density = solve_u(cons, cfg.root_tol)?;
    let k = harmonic_scale(a.col_sums()).ok_or_else(|| {
        Error::Infeasible("some release time never arrives within the symbol".into())
    })?;
    let m = a.releases();
    let mf = m as f64;
    let eta = cfg.eta_for(cons);
    let p_star = a.best_col_sum();
    let mean_log_col: f64 = a.col_sums().iter().map(|p| p.ln()).sum::<f64>() / mf;
    let shared = -(eta * p_star).ln() - k.ln() - 0.5 * mean_log_col;

    let (mean_log, entropy) = (density.mean_log()?, density.entropy());
    let concentration = match cfg.lb3_variant {
        Lb3Variant::Normalized => {
            entropy - 0.5 * mean_log - reference_penalty(cons, eta, m) - 0.5 * (2.0 * PI * E).ln()
                + shared
        }
        Lb3Variant::Literal => {
            let (u, peak) = (density.u, cons.peak);
            let s = density.scale();
            peak.ln() * erf(s) / (2.0 * mf)
                - peak * hyp2f2_half(-s * s)? / (2.0 * mf * (PI * u).sqrt())
                + 0.5 * (2.0 * PI * u * E).ln()
                - mf
                + shared
        }
    };

    let mut best: Option<(f64, usize, MixtureEntropy)> = None;
    let mut last_err = None;
    for i in 2..=n {
        if (0..m).any(|j| a.diff_var(i, j) <= 0.0) {
            last_err = Some(Error::DegenerateVariance {
                interval: i,
                release: (0..m).find(|&j| a.diff_var(i, j) <= 0.0).unwrap_or(0),
            });
            continue;
        }
        let comps: Vec<GaussianComponent> = (0..m)
            .map(|j| GaussianComponent {
                weight: 1.0 / mf,
                mean: cons.mean * a.diff(i, j),
                variance: cons.mean * a.diff_var(i, j),
            })
            .collect();
        let mix = match mixture_entropy_lower(&comps, cons.mean * a.diff(i, 0), cfg.taylor_order) {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let timing = match cfg.lb3_variant {
            Lb3Variant::Normalized => {
                mix.value
                    - comps
                        .iter()
                        .map(|c| 0.5 * (2.0 * PI * E * c.variance).ln())
                        .sum::<f64>()
                        / mf
            }
            Lb3Variant::Literal => {
                mix.value
                    + (0..m)
                        .map(|j| 0.5 * (2.0 * PI * E * a.diff_var(i, j)).ln())
                        .sum::<f64>()
                        / (2.0 * mf)
            }
        };
        if best.as_ref().is_none_or(|(b, _, _)| timing > *b) {
            best = Some((timing, i, mix));
        }
    }
    let (timing, interval, mixture) = best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::InvalidParameter("no adjacent pair available".into()))
    })?;
    Ok(Lb3 {
        rate: Rate(concentration + timing),
        interval,
        density,
        concentration,
        timing,
        mixture,
    })
}
