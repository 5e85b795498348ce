//! Oracles and helpers shared by the integration tests.
//!
//! The bound re-derivations below take the arrival probabilities and the
//! solver outputs from the crate, then recompute every expectation and
//! entropy by adaptive quadrature or brute-force summation.

#![allow(dead_code)]

pub mod criteria;

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jtac::channel::ArrivalMatrix;
use jtac_oracle::{integrate, series};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn config_path(name: &str) -> PathBuf {
    workspace_root().join("configs").join(name)
}

pub fn jtac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jtac"))
        .args(args)
        .output()
        .expect("spawn jtac")
}

/// A CSV file read back as header plus string records.
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<HashMap<String, String>>,
}

impl Csv {
    pub fn read(path: &Path) -> Csv {
        let mut r =
            csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| {
                let rec = rec.unwrap();
                header
                    .iter()
                    .cloned()
                    .zip(rec.iter().map(String::from))
                    .collect()
            })
            .collect();
        Csv { header, rows }
    }

    /// Numeric column; empty cells are `None`.
    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        assert!(self.header.iter().any(|h| h == name), "no column {name}");
        self.rows
            .iter()
            .map(|r| {
                let s = &r[name];
                if s.is_empty() {
                    None
                } else {
                    Some(s.parse().unwrap())
                }
            })
            .collect()
    }

    /// Numeric column that must be complete.
    pub fn values(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .into_iter()
            .map(|v| v.unwrap_or_else(|| panic!("missing value in {name}")))
            .collect()
    }
}

pub fn rows_of(a: &ArrivalMatrix) -> Vec<Vec<f64>> {
    (1..=a.intervals()).map(|i| a.row(i).to_vec()).collect()
}

pub fn levy_density(tau: f64, c: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    (c / (2.0 * PI * tau.powi(3))).sqrt() * (-c / (2.0 * tau)).exp()
}

/// Probability that a molecule released at `release` arrives in
/// `[(i−1) t_b, i t_b]`, by quadrature of the Lévy density.
pub fn arrival_quad(i: usize, release: f64, c: f64, t_b: f64) -> f64 {
    let lo = ((i - 1) as f64 * t_b).max(release);
    let hi = i as f64 * t_b;
    if hi <= lo {
        return 0.0;
    }
    integrate(|t| levy_density(t - release, c), lo, hi, 1e-13, 1e-13)
}

/// Quadrature moments of a density on `[0, M]`, given up to a constant.
pub struct DensityMoments {
    pub mass: f64,
    pub mean: f64,
    pub entropy: f64,
    pub mean_log: f64,
}

/// Integrates over `x = M t²` so an `x^{-1/2}` singularity at the origin
/// becomes a smooth integrand.
fn over_density<G: Fn(f64) -> f64>(g: G, peak: f64) -> f64 {
    integrate(
        |t| g(peak * t * t) * 2.0 * peak * t,
        0.0,
        1.0,
        1e-300,
        1e-13,
    )
}

/// Normalises `shape` numerically and returns its moments.
pub fn density_moments<F: Fn(f64) -> f64>(shape: F, peak: f64) -> DensityMoments {
    let z = over_density(&shape, peak);
    let f = |x: f64| shape(x) / z;
    let plogp = |x: f64| {
        let v = f(x);
        if v > 0.0 {
            -v * v.ln()
        } else {
            0.0
        }
    };
    DensityMoments {
        mass: z,
        mean: over_density(|x| x * f(x), peak),
        entropy: over_density(plogp, peak),
        mean_log: over_density(|x| f(x) * x.ln(), peak),
    }
}

/// Expectation of `g(X)` for the normalised `shape`.
pub fn expect<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(shape: F, g: G, peak: f64) -> f64 {
    let z = over_density(&shape, peak);
    over_density(|x| shape(x) * g(x), peak) / z
}

pub fn poisson_entropy_brute(lambda: f64) -> f64 {
    let k_max = (lambda + 40.0 * lambda.sqrt() + 60.0) as u64;
    series::poisson_entropy_brute(lambda, k_max)
}

fn harmonic(p: &[f64]) -> f64 {
    1.0 / p.iter().map(|v| 1.0 / v).sum::<f64>()
}

fn col_sums(p: &[Vec<f64>]) -> Vec<f64> {
    let m = p[0].len();
    (0..m).map(|j| p.iter().map(|row| row[j]).sum()).collect()
}

/// Single best sub-interval rate with `η = E_m`, density
/// `x^{-1/2} e^{-μx/M}`.
pub fn lb1_oracle(p: &[Vec<f64>], mean: f64, peak: f64, mu: f64) -> f64 {
    let m = p[0].len() as f64;
    let shape = |x: f64| x.powf(-0.5) * (-mu * x / peak).exp();
    let d = density_moments(shape, peak);
    let mut best = f64::NEG_INFINITY;
    for row in p {
        if row.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let ps = row.iter().cloned().fold(0.0, f64::max);
        // the correction integrand drops the exponential tilt but keeps the
        // normaliser of the tilted density
        let corr =
            over_density(|x| x.powf(-0.5) * (1.0 + 1.0 / (12.0 * ps * x)).ln(), peak) / d.mass;
        let r = m.ln() + d.entropy
            - 0.5 * d.mean_log
            - m
            - 0.5 * (2.0 * PI * E).ln()
            - (mean * ps).ln()
            - harmonic(row).ln()
            - 0.5 * ps.ln()
            - 0.5 * corr;
        best = best.max(r);
    }
    best
}

/// Sum-then-time rate `R2` with `η = E_m`, density `e^{φx}/(bx + 1)`.
/// `R1` is `R2 + m − ln m − 1`.
pub fn lb2_r2_oracle(p: &[Vec<f64>], mean: f64, peak: f64, phi: f64) -> f64 {
    let m = p[0].len() as f64;
    let cols = col_sums(p);
    let ps = cols.iter().cloned().fold(0.0, f64::max);
    let b = 12.0 * ps;
    let shape = |x: f64| (phi * x).exp() / (b * x + 1.0);
    let d = density_moments(shape, peak);
    let e_log_y = expect(shape, |x| (ps * x + 1.0 / 12.0).ln(), peak);
    let h_poisson = p
        .iter()
        .map(|row| poisson_entropy_brute(peak * row.iter().cloned().fold(f64::INFINITY, f64::min)))
        .fold(f64::NEG_INFINITY, f64::max);
    m.ln() + d.entropy - e_log_y - (mean * ps).ln() - m - (2.0 * PI * E).ln() - harmonic(&cols).ln()
        + h_poisson
}

/// Adjacent-difference rate (normalised variant) with `η = E_m`, density
/// `e^{−x²/u}` on `[0, M]`. The mixture entropy comes from `mixture`.
pub fn lb3_oracle<F>(p: &[Vec<f64>], mean: f64, peak: f64, u: f64, mixture: F) -> f64
where
    F: Fn(&[(f64, f64, f64)], f64) -> f64,
{
    let m = p[0].len();
    let mf = m as f64;
    let cols = col_sums(p);
    let ps = cols.iter().cloned().fold(0.0, f64::max);
    let d = density_moments(|x: f64| (-x * x / u).exp(), peak);
    let concentration = d.entropy
        - 0.5 * d.mean_log
        - mf
        - 0.5 * (2.0 * PI * E).ln()
        - (mean * ps).ln()
        - harmonic(&cols).ln()
        - 0.5 * cols.iter().map(|v| v.ln()).sum::<f64>() / mf;
    let mut best = f64::NEG_INFINITY;
    for i in 1..p.len() {
        let comps: Vec<(f64, f64, f64)> = (0..m)
            .map(|j| {
                (
                    1.0 / mf,
                    mean * (p[i][j] - p[i - 1][j]),
                    mean * (p[i][j] + p[i - 1][j]),
                )
            })
            .collect();
        if comps.iter().any(|c| c.2 <= 0.0) {
            continue;
        }
        let own: f64 = comps
            .iter()
            .map(|c| 0.5 * (2.0 * PI * E * c.2).ln())
            .sum::<f64>()
            / mf;
        best = best.max(mixture(&comps, comps[0].1) - own);
    }
    concentration + best
}

/// Differential entropy of `Σ w N(mean, var)` by quadrature.
pub fn mixture_entropy_quad(comps: &[(f64, f64, f64)]) -> f64 {
    let sd = comps.iter().map(|c| c.2.sqrt()).fold(0.0, f64::max);
    let lo = comps.iter().map(|c| c.1).fold(f64::INFINITY, f64::min) - 14.0 * sd;
    let hi = comps.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max) + 14.0 * sd;
    let g = |y: f64| {
        comps
            .iter()
            .map(|&(w, mu, v)| w * (-(y - mu).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt())
            .sum::<f64>()
    };
    // split at every component mean so narrow peaks are never stepped over
    let mut cuts: Vec<f64> = comps.iter().map(|c| c.1).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            integrate(
                |y| {
                    let v = g(y);
                    if v > 0.0 {
                        -v * v.ln()
                    } else {
                        0.0
                    }
                },
                w[0],
                w[1],
                1e-13,
                1e-13,
            )
        })
        .sum()
}
