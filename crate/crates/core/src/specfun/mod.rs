//! Special functions used by the channel model and the bounds.
//!
//! Everything is real-valued `f64` and self-contained; no external numerics
//! library is involved. All functions are pure.

mod erf;
mod expint;
mod hypergeom;
mod moments;
mod poisson;

pub use erf::{erf, erfc, erfi};
pub use expint::expint_ei;
pub use hypergeom::{hyp2f2_half, hyp2f2_half_with};
pub use moments::{gaussian_central_moment, gaussian_noncentral_moment, MAX_MOMENT_ORDER};
pub use poisson::{
    ln_factorial, poisson_entropy, poisson_ln_pmf, poisson_pmf, poisson_pmf_table,
    poisson_upper_quantile,
};

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub(crate) const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
pub(crate) const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Stopping rule for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    rel_tol: f64,
    max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "series rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_terms < 10 {
            return Err(Error::InvalidParameter(format!(
                "series max_terms must be at least 10, got {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}
