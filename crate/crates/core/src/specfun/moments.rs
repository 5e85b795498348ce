/// Highest moment order accepted by the moment routines.
pub const MAX_MOMENT_ORDER: u32 = 64;

/// E[(Z − μ)^k] for Z ~ N(μ, v): zero for odd k, v^{k/2}(k−1)!! for even k.
pub fn gaussian_central_moment(k: u32, variance: f64) -> f64 {
    assert!(k <= MAX_MOMENT_ORDER, "moment order {k} above cap");
    if k % 2 == 1 {
        return 0.0;
    }
    let mut double_fact = 1.0;
    let mut j = k as i64 - 1;
    while j > 1 {
        double_fact *= j as f64;
        j -= 2;
    }
    variance.powi(k as i32 / 2) * double_fact
}

/// E[Z^k] for Z ~ N(mean, variance), via the binomial expansion over the
/// central moments. With zero variance this is exactly mean^k.
pub fn gaussian_noncentral_moment(k: u32, mean: f64, variance: f64) -> f64 {
    assert!(variance >= 0.0, "negative variance {variance}");
    let mut binom = 1.0;
    let mut total = 0.0;
    for l in 0..=k {
        if l > 0 {
            binom = binom * (k - l + 1) as f64 / l as f64;
        }
        if l % 2 == 0 {
            total += binom * mean.powi((k - l) as i32) * gaussian_central_moment(l, variance);
        }
    }
    total
}
