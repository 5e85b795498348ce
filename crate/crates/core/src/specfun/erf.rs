use super::{FRAC_2_SQRT_PI, SQRT_PI};

// Below this the all-positive series is used; above it the continued fraction
// for erfc converges in a few dozen steps.
const SERIES_LIMIT: f64 = 2.5;

/// Error function, absolute error below 1e-15 on the real line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        erf_series(ax)
    } else {
        1.0 - erfc_cf(ax)
    };
    v.copysign(x)
}

/// Complementary error function. Relative accuracy is kept in the right tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= SERIES_LIMIT {
        erfc_cf(x)
    } else if x > -SERIES_LIMIT {
        1.0 - erf(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

/// Imaginary error function erfi(x) = -i erf(ix) = (2/√π) ∫₀ˣ e^{t²} dt.
pub fn erfi(x: f64) -> f64 {
    // Σ x^{2k+1} / (k! (2k+1)); every term is positive.
    let ax = x.abs();
    let x2 = ax * ax;
    let mut power = ax;
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        let term = power / (2 * k + 1) as f64;
        sum += term;
        if term <= 1e-17 * sum || k > 5000 || !sum.is_finite() {
            break;
        }
        k += 1;
        power *= x2 / k as f64;
    }
    (FRAC_2_SQRT_PI * sum).copysign(x)
}

/// erf(x) = (2/√π) e^{-x²} Σ 2^k x^{2k+1} / (2k+1)!!  for x ≥ 0.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0usize;
    while term > 1e-17 * sum {
        term *= 2.0 * x2 / (2 * k + 3) as f64;
        sum += term;
        k += 1;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), x > 0,
/// evaluated with the modified Lentz method.
fn erfc_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (SQRT_PI * f)
}
