//! Brute-force series, integral identities and finite differences.

use crate::quad::{integrate, integrate_to_infinity};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Maclaurin series of erf, summed until the term falls below `cutoff`.
/// Only meaningful for moderate |x| (cancellation grows like e^{x²}).
pub fn erf_taylor(x: f64, cutoff: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = x; // x^{2k+1} / k!
    let mut k = 0usize;
    loop {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = sign * power / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < cutoff && k > 2 {
            break;
        }
        k += 1;
        power *= x * x / k as f64;
        assert!(k < 10_000);
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// erf by quadrature of its defining integral.
pub fn erf_quad(x: f64) -> f64 {
    2.0 / std::f64::consts::PI.sqrt() * integrate(|t| (-t * t).exp(), 0.0, x, 1e-16, 1e-15)
}

/// Ei(x) = γ + ln|x| + ∫₀ˣ (eᵗ − 1)/t dt, evaluated by quadrature. The
/// integrand is smooth, so the principal value never has to be handled.
pub fn ei_quad(x: f64) -> f64 {
    let g = |t: f64| {
        if t.abs() < 1e-8 {
            1.0 + 0.5 * t
        } else {
            t.exp_m1() / t
        }
    };
    EULER_GAMMA + x.abs().ln() + integrate(g, 0.0, x, 1e-300, 1e-14)
}

/// E₁(x) = ∫ₓ^∞ e^{−t}/t dt for x > 0, as e^{−x} ∫₀^∞ e^{−s}/(x + s) ds.
/// Keeps full relative accuracy where Ei(−x) = −E₁(x) is tiny.
pub fn e1_quad(x: f64) -> f64 {
    assert!(x > 0.0);
    let scaled = integrate_to_infinity(|s| (-s).exp() / (x + s), 0.0, 1e-300, 1e-14);
    (-x).exp() * scaled
}

/// Direct term-by-term series of ₂F₂(½,½;3/2,3/2;x).
pub fn hyp2f2_series(x: f64, cutoff: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0; // x^k / k!
    let mut k = 0usize;
    loop {
        let d = (2 * k + 1) as f64;
        let term = power / (d * d);
        sum += term;
        if term.abs() < cutoff * sum.abs().max(1e-300) && k > 2 {
            break;
        }
        k += 1;
        power *= x / k as f64;
        assert!(k < 100_000);
    }
    sum
}

/// ₂F₂(½,½;3/2,3/2;x) for x ≤ 0 from the double integral
/// ∫₀¹∫₀¹ e^{x a² b²} db da, with the inner integral done in closed form
/// through an erf that is itself evaluated by quadrature.
pub fn hyp2f2_quad(x: f64) -> f64 {
    assert!(x <= 0.0);
    let s = (-x).sqrt();
    let inner = |a: f64| {
        let z = a * s;
        if z < 1e-8 {
            1.0 - z * z / 3.0
        } else {
            0.5 * std::f64::consts::PI.sqrt() * erf_quad(z) / z
        }
    };
    integrate(inner, 0.0, 1.0, 1e-300, 1e-14)
}

/// ln n! by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn poisson_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
}

/// −Σ P(k) ln P(k) summed over k = 0..=k_max.
pub fn poisson_entropy_brute(lambda: f64, k_max: u64) -> f64 {
    (0..=k_max)
        .map(|k| poisson_pmf(k, lambda))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

/// k-th derivative of `f` at `x` by central differences with Richardson
/// extrapolation over step halvings starting from `h`.
pub fn derivative<F: Fn(f64) -> f64>(f: &F, x: f64, k: usize, h: f64) -> f64 {
    if k == 0 {
        return f(x);
    }
    let binom = |n: usize, r: usize| -> f64 {
        (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let central = |h: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom(k, i) * f(x + (k as f64 / 2.0 - i as f64) * h);
        }
        s / h.powi(k as i32)
    };
    let levels = 4;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut step = h;
    for lvl in 0..levels {
        let mut row = vec![central(step)];
        for j in 1..=lvl {
            let factor = 4f64.powi(j as i32);
            let v = (factor * row[j - 1] - table[lvl - 1][j - 1]) / (factor - 1.0);
            row.push(v);
        }
        table.push(row);
        step *= 0.5;
    }
    table[levels - 1][levels - 1]
}

/// Plain bisection on a sign change; returns the midpoint of the final bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
