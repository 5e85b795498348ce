//! Closed-form achievable rates and the symmetric-KL upper bound.
//!
//! All internal arithmetic is in nats; [`Rate`] converts on the way out.

mod difference;
mod mixture;
mod single;
mod sum;
mod upper;

pub use difference::{lower_bound_3, solve_u, HalfGaussian, Lb3};
pub use mixture::{log_density_taylor, mixture_entropy_lower, GaussianComponent, MixtureEntropy};
pub use single::{alpha_of_mu, explog_correction, g_mu, lower_bound_1, solve_mu, Lb1, MuRoot};
pub use sum::{lower_bound_2, solve_phi, timing_rate_given_x, Lb2, PhiRoot, TimingRate};
pub use upper::{sym_kl_interval_bound, upper_bound};

use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};
use crate::specfun::MAX_MOMENT_ORDER;

/// Average and peak limits on the released concentration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    /// Average concentration cap `E_m`.
    pub mean: f64,
    /// Peak concentration `M`.
    pub peak: f64,
}

impl ConstraintSet {
    pub fn new(mean: f64, peak: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite() && peak.is_finite() && mean <= peak) {
            return Err(Error::InvalidParameter(format!(
                "constraints need 0 < E_m <= M, got E_m = {mean}, M = {peak}"
            )));
        }
        Ok(Self { mean, peak })
    }

    /// Constraints given the peak and the ratio `E_m / M`.
    pub fn from_ratio(peak: f64, alpha: f64) -> Result<Self> {
        Self::new(alpha * peak, peak)
    }

    pub fn alpha(&self) -> f64 {
        self.mean / self.peak
    }
}

/// Which assembly of the adjacent-difference bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lb3Variant {
    /// Properly normalised input density; every term is the expectation it
    /// stands for.
    #[default]
    Normalized,
    /// The printed closed-form display, kept for side-by-side comparison.
    Literal,
}

/// Numerical knobs shared by the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    /// Mean of the reference output law. `None` uses `E_m`.
    pub eta: Option<f64>,
    /// Order of the Taylor expansion of the log mixture density (even).
    pub taylor_order: u32,
    pub root_tol: f64,
    pub y_tail_mass: f64,
    pub lb3_variant: Lb3Variant,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            eta: None,
            taylor_order: 4,
            root_tol: 1e-10,
            y_tail_mass: 1e-12,
            lb3_variant: Lb3Variant::Normalized,
        }
    }
}

impl BoundConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(eta) = self.eta {
            if !(eta > 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "eta must be positive, got {eta}"
                )));
            }
        }
        if !self.taylor_order.is_multiple_of(2) || self.taylor_order > MAX_MOMENT_ORDER {
            return Err(Error::InvalidParameter(format!(
                "Taylor order must be even and at most {MAX_MOMENT_ORDER}, got {}",
                self.taylor_order
            )));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::InvalidParameter("root_tol must be positive".into()));
        }
        if !(self.y_tail_mass > 0.0 && self.y_tail_mass < 1.0) {
            return Err(Error::InvalidParameter(
                "y_tail_mass must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn eta_for(&self, cons: &ConstraintSet) -> f64 {
        self.eta.unwrap_or(cons.mean)
    }
}

/// A rate, stored in nats.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rate(pub f64);

impl Rate {
    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 / std::f64::consts::LN_2
    }

    /// The rate floored at zero, which is always achievable.
    pub fn clamped(self) -> Rate {
        Rate(self.0.max(0.0))
    }

    pub fn in_units(self, bits: bool) -> f64 {
        if bits {
            self.bits()
        } else {
            self.nats()
        }
    }
}

/// Penalty from the divergence to the reference output law:
/// `E_m/η + m − 1`, which is `m` when `η = E_m`.
pub(crate) fn reference_penalty(cons: &ConstraintSet, eta: f64, m: usize) -> f64 {
    cons.mean / eta + m as f64 - 1.0
}

/// `1 / Σ 1/p` over the given probabilities, `None` if any is zero.
pub(crate) fn harmonic_scale(p: &[f64]) -> Option<f64> {
    let mut s = 0.0;
    for &v in p {
        if v <= 0.0 {
            return None;
        }
        s += 1.0 / v;
    }
    Some(1.0 / s)
}

/// Every closed-form quantity for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lb1: Result<Lb1>,
    pub lb2: Result<Lb2>,
    pub lb3: Result<Lb3>,
    pub timing_given_x: Result<TimingRate>,
    pub ub: Result<Rate>,
}

/// Evaluates every bound. `x_timing` is the fixed concentration used by the
/// timing-increment rate.
pub fn evaluate_bounds(
    a: &ArrivalMatrix,
    cons: &ConstraintSet,
    cfg: &BoundConfig,
    lambda0: f64,
    x_timing: f64,
) -> BoundReport {
    BoundReport {
        lb1: lower_bound_1(a, cons, cfg),
        lb2: lower_bound_2(a, cons, cfg),
        lb3: lower_bound_3(a, cons, cfg),
        timing_given_x: timing_rate_given_x(a, x_timing),
        ub: upper_bound(a, cons, lambda0),
    }
}
