//! Lower estimate of the differential entropy of a Gaussian mixture.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::specfun::{gaussian_noncentral_moment, MAX_MOMENT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureEntropy {
    /// The reported value, `min(taylor, pairwise)`.
    pub value: f64,
    /// `−Σ_k z_k E[(Y − y0)^k]` with `z_k` the Taylor coefficients of
    /// `ln g` at `y0`.
    pub taylor: f64,
    /// Pairwise Bhattacharyya lower bound on the entropy.
    pub pairwise: f64,
}

/// Entropy estimate for `Σ_j a_j N(c_j, v_j)`.
///
/// The order-`order` Taylor expansion of `ln g` about `y0` is averaged
/// against each component's non-central moments. Truncation can push that
/// estimate above the true entropy, so it is capped by the pairwise
/// Bhattacharyya bound, which never exceeds it.
pub fn mixture_entropy_lower(
    components: &[GaussianComponent],
    y0: f64,
    order: u32,
) -> Result<MixtureEntropy> {
    validate(components, order)?;
    let taylor = taylor_estimate(components, y0, order)?;
    let pairwise = pairwise_bound(components);
    Ok(MixtureEntropy {
        value: taylor.min(pairwise),
        taylor,
        pairwise,
    })
}

fn validate(components: &[GaussianComponent], order: u32) -> Result<()> {
    if components.is_empty() {
        return Err(Error::InvalidParameter("mixture has no components".into()));
    }
    if !order.is_multiple_of(2) || order > MAX_MOMENT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "Taylor order must be even and at most {MAX_MOMENT_ORDER}, got {order}"
        )));
    }
    let mut total = 0.0;
    for c in components {
        if !(c.weight >= 0.0 && c.mean.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bad mixture component {c:?}"
            )));
        }
        if !(c.variance > 0.0 && c.variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mixture variance must be positive, got {}",
                c.variance
            )));
        }
        total += c.weight;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "mixture weights sum to {total}"
        )));
    }
    Ok(())
}

/// Taylor coefficients `z_0..=z_order` of `ln g` at `y0`.
///
/// Derivatives of `g` come from Hermite polynomials; derivatives of `ln g`
/// follow from `g^{(n)} = Σ_k C(n−1, k−1) (ln g)^{(k)} g^{(n−k)}`. Every
/// component density is scaled by the largest one so nothing underflows.
pub fn log_density_taylor(
    components: &[GaussianComponent],
    y0: f64,
    order: u32,
) -> Result<Vec<f64>> {
    let n = order as usize;
    let log_terms: Vec<f64> = components
        .iter()
        .map(|c| {
            let t = (y0 - c.mean) / c.variance.sqrt();
            c.weight.ln() - 0.5 * t * t - 0.5 * (2.0 * PI * c.variance).ln()
        })
        .collect();
    let shift = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // g^{(k)} / e^{shift}
    let mut g = vec![0.0; n + 1];
    for (c, lt) in components.iter().zip(&log_terms) {
        let scale = (lt - shift).exp();
        if scale == 0.0 {
            continue;
        }
        let sigma = c.variance.sqrt();
        let t = (y0 - c.mean) / sigma;
        // d^k/dy^k φ = (−1/σ)^k He_k(t) φ
        let (mut he_prev, mut he) = (0.0, 1.0);
        let mut factor = 1.0;
        for (k, gk) in g.iter_mut().enumerate() {
            if k > 0 {
                let next = t * he - (k - 1) as f64 * he_prev;
                he_prev = he;
                he = next;
                factor *= -1.0 / sigma;
            }
            *gk += scale * factor * he;
        }
    }
    let g0 = g[0];
    let mut lder = vec![0.0; n + 1];
    lder[0] = shift + g0.ln();
    for k in 1..=n {
        let mut acc = g[k];
        let mut binom = 1.0; // C(k−1, j−1)
        for j in 1..k {
            acc -= binom * lder[j] * g[k - j];
            binom = binom * (k - j) as f64 / j as f64;
        }
        lder[k] = acc / g0;
    }
    let mut fact = 1.0;
    let mut z = Vec::with_capacity(n + 1);
    for (k, l) in lder.into_iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        z.push(l / fact);
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Instability(format!(
            "Taylor coefficients of the log mixture density blew up at order {order}; use a smaller order"
        )));
    }
    Ok(z)
}

fn taylor_estimate(components: &[GaussianComponent], y0: f64, order: u32) -> Result<f64> {
    let z = log_density_taylor(components, y0, order)?;
    let mut h = 0.0;
    for (k, zk) in z.iter().enumerate() {
        let moment: f64 = components
            .iter()
            .map(|c| c.weight * gaussian_noncentral_moment(k as u32, c.mean - y0, c.variance))
            .sum();
        h -= zk * moment;
    }
    if !h.is_finite() {
        return Err(Error::Instability(format!(
            "Taylor entropy estimate is not finite at order {order}; use a smaller order"
        )));
    }
    Ok(h)
}

/// `Σ_i w_i h_i − Σ_i w_i ln Σ_j w_j e^{−BD_ij}` with BD the Bhattacharyya
/// distance between components.
fn pairwise_bound(components: &[GaussianComponent]) -> f64 {
    let mut h = 0.0;
    for ci in components.iter().filter(|c| c.weight > 0.0) {
        let mut inner = 0.0;
        for cj in components.iter().filter(|c| c.weight > 0.0) {
            let s = ci.variance + cj.variance;
            let d = ci.mean - cj.mean;
            let bd = 0.25 * d * d / s + 0.5 * (s / (2.0 * (ci.variance * cj.variance).sqrt())).ln();
            inner += cj.weight * (-bd).exp();
        }
        h += ci.weight * (0.5 * (2.0 * PI * E * ci.variance).ln() - inner.ln());
    }
    h
}
