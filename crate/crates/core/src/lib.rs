//! Information-theoretic analysis of joint time-and-concentration (JTAC)
//! modulation over a diffusive molecular channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: error function, exponential integral, ₂F₂, Poisson entropy.
//! * [`channel`]: Lévy first-arrival law and the arrival-probability matrix.
//! * [`bounds`]: closed-form achievable rates and the symmetric-KL upper bound.
//! * [`capacity`]: discretised channels, Blahut-Arimoto, timing-only rates.
//! * [`sweep`]: experiment configs, parameter sweeps, CSV and SVG output.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod capacity;
pub mod channel;
pub mod error;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
