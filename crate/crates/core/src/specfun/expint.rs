use super::EULER_GAMMA;
use crate::error::{Error, Result};

const ASYMPTOTIC_FROM: f64 = 40.0;
const OVERFLOW_FROM: f64 = 700.0;

/// Exponential integral Ei(x) = −∫_{−x}^∞ e^{−t}/t dt (principal value).
///
/// Branches: E₁ series (|x| ≤ 1) or continued fraction (x < −1) for negative
/// arguments, the ascending series up to 40 and the asymptotic series above.
pub fn expint_ei(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func: "expint_ei",
            arg: x,
            reason: "not finite",
        });
    }
    if x == 0.0 {
        return Err(Error::Domain {
            func: "expint_ei",
            arg: x,
            reason: "logarithmic singularity at zero",
        });
    }
    if x > OVERFLOW_FROM {
        return Err(Error::Domain {
            func: "expint_ei",
            arg: x,
            reason: "result overflows beyond x = 700",
        });
    }
    if x < 0.0 {
        let t = -x;
        if t <= 1.0 {
            Ok(ascending(x))
        } else {
            Ok(-e1_continued_fraction(t))
        }
    } else if x <= ASYMPTOTIC_FROM {
        Ok(ascending(x))
    } else {
        Ok(asymptotic(x))
    }
}

/// γ + ln|x| + Σ_{k≥1} x^k / (k·k!)
fn ascending(x: f64) -> f64 {
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        power *= x / k as f64;
        let term = power / k as f64;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + x.abs().ln() + sum
}

/// (eˣ/x) Σ k!/x^k, stopped at the smallest term.
fn asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * k as f64 / x;
        if next >= term || next < 1e-17 {
            break;
        }
        term = next;
        sum += term;
    }
    x.exp() / x * sum
}

/// E₁(t) for t > 1 by the continued fraction e^{−t}/(t+1−1²/(t+3−2²/(t+5−…))).
fn e1_continued_fraction(t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = t + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-t).exp()
}
