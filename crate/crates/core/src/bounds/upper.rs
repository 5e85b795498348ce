//! Upper bound on capacity through the symmetric KL divergence.

use super::{ConstraintSet, Rate};
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};

/// Bound on `I(X, T; Y_i)` for one sub-interval:
/// `(E_m p_i*/M)(M − E_m) ln(M p_i*/λ₀ + 1)`.
pub fn sym_kl_interval_bound(
    a: &ArrivalMatrix,
    i: usize,
    cons: &ConstraintSet,
    lambda0: f64,
) -> Result<Rate> {
    if !(lambda0 > 0.0) {
        return Err(Error::InvalidParameter(
            "the symmetric-KL bound diverges without background noise (lambda0 = 0)".into(),
        ));
    }
    if cons.mean > 0.5 * cons.peak {
        return Err(Error::InvalidParameter(format!(
            "the symmetric-KL bound needs E_m <= M/2, got E_m = {}, M = {}",
            cons.mean, cons.peak
        )));
    }
    let p = a.row_max(i);
    let (em, peak) = (cons.mean, cons.peak);
    Ok(Rate(
        em * p / peak * (peak - em) * (peak * p / lambda0).ln_1p(),
    ))
}

/// Sum of the per-interval bounds over all sub-intervals.
pub fn upper_bound(a: &ArrivalMatrix, cons: &ConstraintSet, lambda0: f64) -> Result<Rate> {
    let mut total = 0.0;
    for i in 1..=a.intervals() {
        total += sym_kl_interval_bound(a, i, cons, lambda0)?.0;
    }
    Ok(Rate(total))
}
