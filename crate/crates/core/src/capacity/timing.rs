//! Timing-only rate: fixed concentration, information in the release time.

use super::ba::{blahut_arimoto, mutual_information, BaOptions};
use super::discrete::{timing_channel, Truncation};
use crate::bounds::Rate;
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};

/// Law of the release time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingInput {
    #[default]
    Uniform,
    /// Capacity-achieving law over the release times, by Blahut-Arimoto.
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbRate {
    pub rate: Rate,
    /// Best sub-interval, 1-based.
    pub interval: usize,
}

/// `max_i I(T; Y_i)` with `Y_i | T = j ~ Poisson(x p_ij + λ₀)`.
pub fn tb_rate(
    a: &ArrivalMatrix,
    x_fixed: f64,
    lambda0: f64,
    mode: TimingInput,
    trunc: &Truncation,
    ba: &BaOptions,
) -> Result<TbRate> {
    if !(x_fixed > 0.0 && x_fixed.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "x_fixed must be positive, got {x_fixed}"
        )));
    }
    let m = a.releases();
    let mut best = TbRate {
        rate: Rate(0.0),
        interval: 1,
    };
    if m == 1 {
        return Ok(best);
    }
    for i in 1..=a.intervals() {
        let ch = timing_channel(a, i, x_fixed, lambda0, trunc)?;
        let r = match mode {
            TimingInput::Uniform => mutual_information(&ch, &vec![1.0 / m as f64; m])?,
            TimingInput::Optimized => blahut_arimoto(&ch, None, ba)?.capacity,
        };
        if r.0 > best.rate.0 {
            best = TbRate {
                rate: r,
                interval: i,
            };
        }
    }
    Ok(best)
}
