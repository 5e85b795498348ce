//! The JTAC channel: Lévy first-arrival law, the sub-interval arrival
//! probabilities and the likelihood kernels built on them.
//!
//! Indexing follows the physical picture. Receiver sub-intervals are numbered
//! `i = 1..=n` (sub-interval `i` covers `[(i-1)·t_b, i·t_b]`) and release
//! slots are numbered `j = 0..m` (release at `j·σ_x`).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{erfc, poisson_pmf};

/// Largest `n` or `m` accepted.
pub const MAX_DIMENSION: usize = 512;

const GRID_TOL: f64 = 1e-9;

/// One JTAC channel instance: Lévy scale, slotting at both ends, and the
/// environmental noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Lévy scale `c` (s).
    pub c: f64,
    /// Symbol period `T_s` (s).
    pub symbol_period: f64,
    /// Receiver sub-interval width `t_b` (s).
    pub interval_width: f64,
    /// Spacing of release times `σ_x` (s).
    pub release_step: f64,
    /// Window that holds every release time `τ_x` (s).
    pub release_window: f64,
    /// Number of release times `m`.
    pub releases: usize,
    /// Number of receiver sub-intervals `n`.
    pub intervals: usize,
    /// Mean count of environmental noise molecules per sub-interval `λ₀`.
    pub lambda0: f64,
}

impl ChannelParams {
    /// Builds and validates a parameter set. `t_b` is derived as `T_s / n`.
    pub fn new(
        c: f64,
        symbol_period: f64,
        intervals: usize,
        releases: usize,
        release_step: f64,
        release_window: f64,
        lambda0: f64,
    ) -> Result<Self> {
        let p = Self {
            c,
            symbol_period,
            interval_width: symbol_period / intervals.max(1) as f64,
            release_step,
            release_window,
            releases,
            intervals,
            lambda0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("Lévy scale c must be positive, got {}", self.c));
        }
        if !(self.lambda0 >= 0.0 && self.lambda0.is_finite()) {
            return bad(format!(
                "lambda0 must be non-negative, got {}",
                self.lambda0
            ));
        }
        if self.intervals == 0 || self.intervals > MAX_DIMENSION {
            return bad(format!(
                "n must be in 1..={MAX_DIMENSION}, got {}",
                self.intervals
            ));
        }
        if self.releases == 0 || self.releases > MAX_DIMENSION {
            return bad(format!(
                "m must be in 1..={MAX_DIMENSION}, got {}",
                self.releases
            ));
        }
        if !(self.symbol_period > 0.0 && self.interval_width > 0.0) {
            return bad("symbol period and sub-interval width must be positive".into());
        }
        let covered = self.intervals as f64 * self.interval_width;
        if (covered - self.symbol_period).abs() > GRID_TOL * self.symbol_period.max(1.0) {
            return bad(format!(
                "n·t_b = {covered} does not match the symbol period {}",
                self.symbol_period
            ));
        }
        if !(self.release_step >= 0.0) {
            return bad(format!(
                "release step must be non-negative, got {}",
                self.release_step
            ));
        }
        let last_release = (self.releases - 1) as f64 * self.release_step;
        let slack = GRID_TOL * self.symbol_period.max(1.0);
        if last_release > self.release_window + slack {
            return bad(format!(
                "(m-1)·σ_x = {last_release} exceeds the release window {}",
                self.release_window
            ));
        }
        if self.release_window > self.symbol_period + slack {
            return bad(format!(
                "release window {} exceeds the symbol period {}",
                self.release_window, self.symbol_period
            ));
        }
        Ok(())
    }

    pub fn release_time(&self, j: usize) -> f64 {
        j as f64 * self.release_step
    }
}

/// Transmitter-receiver geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    /// Distance `d` (µm).
    pub distance: f64,
    /// Diffusion coefficient `D` (µm²/s).
    pub diffusion: f64,
}

/// How a geometry is turned into a Lévy scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleRelation {
    /// `c = d²/(2D)`, the first-passage scale of one-dimensional diffusion.
    #[default]
    HalfSquareOverD,
    /// `c = d²/D`, the relation the tabulated diffusion coefficients follow.
    SquareOverD,
}

impl ChannelGeometry {
    pub fn new(distance: f64, diffusion: f64) -> Result<Self> {
        if !(distance > 0.0 && diffusion > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "geometry needs d > 0 and D > 0, got d = {distance}, D = {diffusion}"
            )));
        }
        Ok(Self {
            distance,
            diffusion,
        })
    }

    pub fn levy_scale(&self, relation: ScaleRelation) -> f64 {
        let d2 = self.distance * self.distance;
        match relation {
            ScaleRelation::HalfSquareOverD => d2 / (2.0 * self.diffusion),
            ScaleRelation::SquareOverD => d2 / self.diffusion,
        }
    }
}

/// Lévy scale `c = d²/(2D)`.
pub fn c_from_geometry(geom: &ChannelGeometry) -> f64 {
    geom.levy_scale(ScaleRelation::HalfSquareOverD)
}

/// Density of the first hitting time for a molecule released at `release`.
pub fn levy_pdf(t: f64, release: f64, c: f64) -> f64 {
    let tau = t - release;
    if tau <= 0.0 {
        return 0.0;
    }
    (c / (2.0 * PI * tau * tau * tau)).sqrt() * (-c / (2.0 * tau)).exp()
}

/// Probability that the first hit happens within `tau` of release:
/// `erfc(√(c / 2τ))`.
pub fn levy_cdf(tau: f64, c: f64) -> f64 {
    if tau <= 0.0 {
        0.0
    } else {
        erfc((c / (2.0 * tau)).sqrt())
    }
}

/// `p_ij`: probability that a molecule released at `j·σ_x` hits during
/// sub-interval `i` (1-based).
///
/// A release that falls strictly inside the sub-interval integrates from the
/// release time, and a release at or after the end of the sub-interval gives 0.
pub fn arrival_prob(i: usize, j: usize, params: &ChannelParams) -> f64 {
    assert!(
        i >= 1 && i <= params.intervals,
        "sub-interval {i} out of range"
    );
    assert!(j < params.releases, "release index {j} out of range");
    let release = params.release_time(j);
    let start = (i - 1) as f64 * params.interval_width;
    let end = i as f64 * params.interval_width;
    if release >= end {
        return 0.0;
    }
    // erfc differences keep relative accuracy when both erf terms are near 1.
    let upper = levy_cdf(end - release, params.c);
    let lower = levy_cdf(start - release, params.c);
    (upper - lower).max(0.0)
}

/// The n×m matrix of arrival probabilities with its derived statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalMatrix {
    n: usize,
    m: usize,
    p: Vec<f64>,
    row_max: Vec<f64>,
    row_min: Vec<f64>,
    col_sum: Vec<f64>,
    best_col_sum: f64,
    diff: Vec<f64>,
    diff_var: Vec<f64>,
}

impl ArrivalMatrix {
    /// Evaluates every `p_ij` for the given channel.
    pub fn new(params: &ChannelParams) -> Self {
        let (n, m) = (params.intervals, params.releases);
        let mut p = Vec::with_capacity(n * m);
        for i in 1..=n {
            for j in 0..m {
                p.push(arrival_prob(i, j, params));
            }
        }
        Self::assemble(n, m, p)
    }

    /// Wraps an explicit row-major matrix (row = sub-interval).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter(
                "arrival matrix must be a non-empty rectangle".into(),
            ));
        }
        if n > MAX_DIMENSION || m > MAX_DIMENSION {
            return Err(Error::InvalidParameter(format!(
                "arrival matrix larger than {MAX_DIMENSION}"
            )));
        }
        let p: Vec<f64> = rows.iter().flatten().copied().collect();
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "arrival probabilities must lie in [0, 1]".into(),
            ));
        }
        let out = Self::assemble(n, m, p);
        if let Some(j) = out.col_sum.iter().position(|&s| s > 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "column {j} sums to {} > 1",
                out.col_sum[j]
            )));
        }
        Ok(out)
    }

    fn assemble(n: usize, m: usize, p: Vec<f64>) -> Self {
        let row = |i: usize| &p[i * m..(i + 1) * m];
        let row_max = (0..n)
            .map(|i| row(i).iter().copied().fold(0.0, f64::max))
            .collect();
        let row_min = (0..n)
            .map(|i| row(i).iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let col_sum: Vec<f64> = (0..m).map(|j| (0..n).map(|i| p[i * m + j]).sum()).collect();
        let best_col_sum = col_sum.iter().copied().fold(0.0, f64::max);
        let mut diff = Vec::with_capacity((n - 1) * m);
        let mut diff_var = Vec::with_capacity((n - 1) * m);
        for i in 1..n {
            for j in 0..m {
                let (cur, prev) = (p[i * m + j], p[(i - 1) * m + j]);
                diff.push(cur - prev);
                diff_var.push(cur + prev);
            }
        }
        Self {
            n,
            m,
            p,
            row_max,
            row_min,
            col_sum,
            best_col_sum,
            diff,
            diff_var,
        }
    }

    /// Number of receiver sub-intervals `n`.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of release times `m`.
    pub fn releases(&self) -> usize {
        self.m
    }

    /// `p_ij`, with `i` in `1..=n` and `j` in `0..m`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[(i - 1) * self.m + j]
    }

    /// Row `i` (1-based) as a slice over release indices.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.p[(i - 1) * self.m..i * self.m]
    }

    /// `p_i* = max_j p_ij`.
    pub fn row_max(&self, i: usize) -> f64 {
        self.row_max[i - 1]
    }

    /// `p̃_i = min_j p_ij`.
    pub fn row_min(&self, i: usize) -> f64 {
        self.row_min[i - 1]
    }

    /// `p′_j = Σ_i p_ij`, the probability of arriving within the symbol.
    pub fn col_sum(&self, j: usize) -> f64 {
        self.col_sum[j]
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sum
    }

    /// `p* = max_j p′_j`.
    pub fn best_col_sum(&self) -> f64 {
        self.best_col_sum
    }

    /// `q_ij = p_ij − p_{i−1,j}` for `i` in `2..=n`.
    pub fn diff(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 2 && i <= self.n);
        self.diff[(i - 2) * self.m + j]
    }

    /// `q′_ij = p_ij + p_{i−1,j}` for `i` in `2..=n`.
    pub fn diff_var(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 2 && i <= self.n);
        self.diff_var[(i - 2) * self.m + j]
    }
}

/// P(Y_i = y | X = x, T_x = jσ_x): Poisson with mean `x·p_ij + λ₀`.
///
/// With noise present the mean is the released concentration times the hit
/// probability plus the noise level; the received count itself does not enter.
pub fn poisson_likelihood(
    y: u64,
    x: f64,
    i: usize,
    j: usize,
    a: &ArrivalMatrix,
    lambda0: f64,
) -> f64 {
    poisson_pmf(y, x * a.get(i, j) + lambda0)
}

/// Law of the total count Y_1 + … + Y_n: Poisson with mean `x·p′_j + n·λ₀`.
pub fn sum_likelihood(y: u64, x: f64, j: usize, a: &ArrivalMatrix, lambda0: f64) -> f64 {
    poisson_pmf(y, x * a.col_sum(j) + a.intervals() as f64 * lambda0)
}

/// Gaussian approximation to the law of Y_i − Y_{i−1}: mean `x·q_ij`,
/// variance `x·q′_ij`.
pub fn diff_likelihood(y: f64, x: f64, i: usize, j: usize, a: &ArrivalMatrix) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "concentration must be positive, got {x}"
        )));
    }
    let var = x * a.diff_var(i, j);
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance {
            interval: i,
            release: j,
        });
    }
    let d = y - x * a.diff(i, j);
    Ok((-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params(n: usize, m: usize, c: f64, tb: f64, step: f64) -> ChannelParams {
        let ts = n as f64 * tb;
        ChannelParams::new(c, ts, n, m, step, ((m - 1) as f64 * step).min(ts), 0.0).unwrap()
    }

    #[test]
    fn geometry_to_scale() {
        let g = ChannelGeometry::new(2f64.sqrt(), 1.0).unwrap();
        assert!((c_from_geometry(&g) - 1.0).abs() < 1e-15);
        let t1 = ChannelGeometry::new(21.91, 240.0).unwrap();
        assert!((c_from_geometry(&t1) - 1.0001).abs() < 1e-4);
        let t2 = ChannelGeometry::new(21.91, 4800.0).unwrap();
        assert!((c_from_geometry(&t2) - 0.05001).abs() < 1e-5);
        assert!((t2.levy_scale(ScaleRelation::SquareOverD) - 0.1).abs() < 1e-3);
    }

    #[test]
    fn pdf_support_and_value() {
        assert_eq!(levy_pdf(0.5, 1.0, 1.0), 0.0);
        let expected = (1.0 / (2.0 * PI)).sqrt() * (-0.5f64).exp();
        assert!((levy_pdf(1.0, 0.0, 1.0) - expected).abs() < 1e-15);
        assert!((levy_pdf(1.0, 0.0, 1.0) - 0.241_970_7).abs() < 1e-7);
    }

    #[test]
    fn first_cell() {
        let p = unit_params(1, 1, 1.0, 1.0, 0.0);
        assert!((arrival_prob(1, 0, &p) - 0.317_310_5).abs() < 1e-7);
        let a = ArrivalMatrix::new(&p);
        let v = a.get(1, 0);
        assert_eq!(a.row_max(1), v);
        assert_eq!(a.row_min(1), v);
        assert_eq!(a.col_sum(0), v);
        assert_eq!(a.best_col_sum(), v);
    }

    #[test]
    fn late_release_never_arrives() {
        let p = unit_params(4, 3, 1.0, 1.0, 1.0);
        assert_eq!(arrival_prob(1, 1, &p), 0.0);
        assert_eq!(arrival_prob(2, 2, &p), 0.0);
    }

    #[test]
    fn release_inside_interval_is_clamped() {
        let p = ChannelParams::new(1.0, 4.0, 4, 2, 1.5, 1.5, 0.0).unwrap();
        // release at 1.5 inside [1, 2]: only the part after release counts
        assert!((arrival_prob(2, 1, &p) - levy_cdf(0.5, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn shift_covariance() {
        let p = unit_params(8, 4, 1.3, 0.7, 0.7);
        for i in 1..=8 {
            for j in 0..4 {
                if i > j {
                    let shifted = arrival_prob(i - j, 0, &p);
                    assert!((arrival_prob(i, j, &p) - shifted).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn columns_partition_the_window() {
        let p = ChannelParams::new(2.0, 10.0, 5, 4, 1.0, 3.0, 0.0).unwrap();
        let a = ArrivalMatrix::new(&p);
        for j in 0..4 {
            let expected = levy_cdf(10.0 - p.release_time(j), p.c);
            assert!((a.col_sum(j) - expected).abs() < 1e-14);
            assert!(a.col_sum(j) <= 1.0);
        }
    }

    #[test]
    fn first_column_is_unimodal() {
        let p = ChannelParams::new(1.0, 20.0, 40, 1, 0.0, 0.0, 0.0).unwrap();
        let col: Vec<f64> = (1..=40).map(|i| arrival_prob(i, 0, &p)).collect();
        let peak = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(col[..=peak].windows(2).all(|w| w[0] <= w[1]));
        assert!(col[peak..].windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn harder_channel_delivers_less() {
        let mut last = f64::INFINITY;
        for &c in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let a = ArrivalMatrix::new(&ChannelParams::new(c, 10.0, 4, 3, 1.0, 2.0, 0.0).unwrap());
            let total: f64 = a.col_sums().iter().sum();
            assert!(total < last);
            last = total;
        }
    }

    #[test]
    fn invalid_params() {
        assert!(ChannelParams::new(0.0, 1.0, 1, 1, 0.0, 0.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 1, 3, 0.6, 1.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 1, 1, 0.0, 2.0, 0.0).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 1, 1, 0.0, 0.0, -0.1).is_err());
        assert!(ChannelParams::new(1.0, 1.0, 600, 1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn likelihood_kernels() {
        let a = ArrivalMatrix::from_rows(&[vec![0.3, 0.2], vec![0.5, 0.1]]).unwrap();
        assert_eq!(poisson_likelihood(0, 0.0, 1, 0, &a, 0.0), 1.0);
        let v = poisson_likelihood(2, 10.0, 1, 0, &a, 0.0);
        assert!((v - (-3.0f64).exp() * 9.0 / 2.0).abs() < 1e-15);
        assert!((v - 0.224_041_8).abs() < 1e-7);
        assert_eq!(sum_likelihood(0, 0.0, 0, &a, 0.0), 1.0);
        let half = ArrivalMatrix::from_rows(&[vec![0.25], vec![0.25]]).unwrap();
        assert!((sum_likelihood(1, 1.0, 0, &half, 0.0) - 0.303_265_3).abs() < 1e-7);

        let peak = diff_likelihood(10.0 * a.diff(2, 0), 10.0, 2, 0, &a).unwrap();
        assert!((peak - 1.0 / (2.0 * PI * 10.0 * a.diff_var(2, 0)).sqrt()).abs() < 1e-15);
        let zero = ArrivalMatrix::from_rows(&[vec![0.0], vec![0.0]]).unwrap();
        assert!(matches!(
            diff_likelihood(0.0, 1.0, 2, 0, &zero),
            Err(Error::DegenerateVariance {
                interval: 2,
                release: 0
            })
        ));
    }

    #[test]
    fn from_rows_rejects_bad_columns() {
        assert!(ArrivalMatrix::from_rows(&[vec![0.7], vec![0.6]]).is_err());
        assert!(ArrivalMatrix::from_rows(&[vec![0.5, 0.1], vec![0.2]]).is_err());
    }
}
