use std::sync::OnceLock;

const TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for k in 1..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// ln(n!), exact summation below 256 and Stirling's series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return ln_factorial_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// ln P(K = k) for K ~ Poisson(λ); −∞ when the mass is zero.
pub fn poisson_ln_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * lambda.ln() - lambda - ln_factorial(k)
}

pub fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    poisson_ln_pmf(k, lambda).exp()
}

/// P(K = k) for k = 0..=hi.
pub fn poisson_pmf_table(lambda: f64, hi: u64) -> Vec<f64> {
    (0..=hi).map(|k| poisson_pmf(k, lambda)).collect()
}

/// Smallest `hi` with P(K > hi) ≤ `tail` for K ~ Poisson(λ).
///
/// The tail is accumulated from far above the mode downwards, so it is
/// accurate even when `tail` is near machine epsilon.
pub fn poisson_upper_quantile(lambda: f64, tail: f64) -> u64 {
    if lambda == 0.0 {
        return 0;
    }
    let far = (lambda + 40.0 * lambda.sqrt() + 60.0).ceil() as u64;
    let mut acc = 0.0;
    let mut k = far;
    // acc holds P(K > k) while walking down.
    while k > 0 {
        let pk = poisson_pmf(k, lambda);
        if acc + pk > tail {
            return k;
        }
        acc += pk;
        k -= 1;
    }
    0
}

/// Entropy (nats) of Poisson(λ) by direct summation. Terms are added outward
/// from the mode until they fall below 1e-18, which leaves an untouched tail
/// mass far below 1e-14.
pub fn poisson_entropy(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let mode = lambda.floor() as u64;
    let term = |k: u64| {
        let lp = poisson_ln_pmf(k, lambda);
        let p = lp.exp();
        (p, -p * lp)
    };
    let mut h = 0.0;
    let mut k = mode;
    loop {
        let (p, t) = term(k);
        h += t;
        if p < 1e-18 && k as f64 > lambda {
            break;
        }
        k += 1;
    }
    let mut k = mode;
    while k > 0 {
        k -= 1;
        let (p, t) = term(k);
        h += t;
        if p < 1e-18 {
            break;
        }
    }
    h
}
