//! Finite-alphabet channels for Blahut-Arimoto.

use crate::bounds::ConstraintSet;
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};
use crate::specfun::{poisson_ln_pmf, poisson_upper_quantile};

/// Default cap on the joint output alphabet.
pub const DEFAULT_ALPHABET_CAP: u64 = 2_000_000;
const NEGLIGIBLE_MASS: f64 = 1e-15;

/// One channel input: a released concentration and, for JTAC inputs, the
/// release index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputSymbol {
    pub x: f64,
    pub release: Option<usize>,
}

/// Truncation settings for count alphabets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Largest probability mass a row may lose to truncation.
    pub y_tail_mass: f64,
    pub alphabet_cap: u64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            y_tail_mass: 1e-12,
            alphabet_cap: DEFAULT_ALPHABET_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct CoordPmf {
    lo: usize,
    pmf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    /// Explicit rows over a flat output alphabet.
    Dense(Vec<Vec<f64>>),
    /// Independent Poisson coordinates; each row keeps one pmf window per
    /// coordinate. The joint alphabet is the box `Π dims`, last coordinate
    /// contiguous.
    Product {
        dims: Vec<usize>,
        strides: Vec<usize>,
        rows: Vec<Vec<CoordPmf>>,
    },
}

/// A discrete memoryless channel with per-input costs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    inputs: Vec<InputSymbol>,
    costs: Vec<f64>,
    law: Law,
    /// `Σ_y W ln W` per row.
    neg_entropy: Vec<f64>,
    tail_mass_dropped: Vec<f64>,
}

impl DiscreteChannel {
    /// Channel from explicit rows. Rows must be stochastic within 1e-9.
    pub fn from_rows(rows: Vec<Vec<f64>>, costs: Vec<f64>) -> Result<Self> {
        let outputs = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || outputs == 0 || rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::InvalidParameter(
                "transition matrix must be a non-empty rectangle".into(),
            ));
        }
        if costs.len() != rows.len() || costs.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::InvalidParameter(
                "need one non-negative cost per input".into(),
            ));
        }
        for (k, r) in rows.iter().enumerate() {
            let s: f64 = r.iter().sum();
            if r.iter().any(|w| !(*w >= 0.0)) || (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "row {k} is not a probability vector (sum {s})"
                )));
            }
        }
        let neg_entropy = rows
            .iter()
            .map(|r| r.iter().map(|&w| xlnx(w)).sum())
            .collect();
        let inputs = costs
            .iter()
            .map(|&c| InputSymbol {
                x: c,
                release: None,
            })
            .collect();
        Ok(Self {
            inputs,
            costs,
            tail_mass_dropped: vec![0.0; rows.len()],
            law: Law::Dense(rows),
            neg_entropy,
        })
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        match &self.law {
            Law::Dense(rows) => rows[0].len(),
            Law::Product { dims, .. } => dims.iter().product(),
        }
    }

    pub fn inputs(&self) -> &[InputSymbol] {
        &self.inputs
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn tail_mass_dropped(&self) -> &[f64] {
        &self.tail_mass_dropped
    }

    /// Shape of the count-vector alphabet, or a single flat dimension.
    pub fn output_shape(&self) -> Vec<usize> {
        match &self.law {
            Law::Dense(rows) => vec![rows[0].len()],
            Law::Product { dims, .. } => dims.clone(),
        }
    }

    /// Row `k` of the transition matrix over the whole output alphabet.
    pub fn row(&self, k: usize) -> Vec<f64> {
        match &self.law {
            Law::Dense(rows) => rows[k].clone(),
            Law::Product { .. } => {
                let mut out = vec![0.0; self.output_count()];
                self.add_row(k, 1.0, &mut out);
                out
            }
        }
    }

    /// Nonzero entries of row `k` as `(output index, probability)`, in index
    /// order.
    pub(crate) fn sparse_row(&self, k: usize) -> Vec<(usize, f64)> {
        match &self.law {
            Law::Dense(rows) => rows[k]
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(y, w)| (y, *w))
                .collect(),
            Law::Product { strides, rows, .. } => {
                let mut out = Vec::new();
                collect_product(&rows[k], strides, 0, 0, 1.0, &mut out);
                out
            }
        }
    }

    /// `q += weight · W(·|k)`
    fn add_row(&self, k: usize, weight: f64, q: &mut [f64]) {
        match &self.law {
            Law::Dense(rows) => {
                for (qy, w) in q.iter_mut().zip(&rows[k]) {
                    *qy += weight * w;
                }
            }
            Law::Product { strides, rows, .. } => add_product(&rows[k], strides, 0, 0, weight, q),
        }
    }

    /// `Σ_y W(y|k) v(y)`
    fn row_dot(&self, k: usize, v: &[f64]) -> f64 {
        match &self.law {
            Law::Dense(rows) => rows[k]
                .iter()
                .zip(v)
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, x)| w * x)
                .sum(),
            Law::Product { strides, rows, .. } => dot_product(&rows[k], strides, 0, 0, v),
        }
    }

    /// `Σ_y W_k(y) ln W_k(y)`.
    pub(crate) fn neg_entropy(&self, k: usize) -> f64 {
        self.neg_entropy[k]
    }

    /// Output law `q = Σ_k p_k W(·|k)`. Inputs with mass below `1e-15` are
    /// skipped.
    pub fn output_distribution(&self, p: &[f64], q: &mut Vec<f64>) {
        q.clear();
        q.resize(self.output_count(), 0.0);
        for (k, &pk) in p.iter().enumerate() {
            if pk > NEGLIGIBLE_MASS {
                self.add_row(k, pk, q);
            }
        }
    }

    /// `D_k = D(W(·|k) ‖ q)` for every input, given `ln q`.
    pub fn divergences(&self, ln_q: &[f64], d: &mut [f64]) {
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = self.neg_entropy[k] - self.row_dot(k, ln_q);
        }
    }
}

fn add_product(
    row: &[CoordPmf],
    strides: &[usize],
    depth: usize,
    offset: usize,
    weight: f64,
    q: &mut [f64],
) {
    let c = &row[depth];
    if depth + 1 == row.len() {
        let start = offset + c.lo;
        for (qy, w) in q[start..start + c.pmf.len()].iter_mut().zip(&c.pmf) {
            *qy += weight * w;
        }
        return;
    }
    for (t, w) in c.pmf.iter().enumerate() {
        add_product(
            row,
            strides,
            depth + 1,
            offset + (c.lo + t) * strides[depth],
            weight * w,
            q,
        );
    }
}

fn collect_product(
    row: &[CoordPmf],
    strides: &[usize],
    depth: usize,
    offset: usize,
    weight: f64,
    out: &mut Vec<(usize, f64)>,
) {
    let c = &row[depth];
    if depth + 1 == row.len() {
        let start = offset + c.lo;
        out.extend(
            c.pmf
                .iter()
                .enumerate()
                .map(|(t, w)| (start + t, weight * w)),
        );
        return;
    }
    for (t, w) in c.pmf.iter().enumerate() {
        collect_product(
            row,
            strides,
            depth + 1,
            offset + (c.lo + t) * strides[depth],
            weight * w,
            out,
        );
    }
}

fn dot_product(row: &[CoordPmf], strides: &[usize], depth: usize, offset: usize, v: &[f64]) -> f64 {
    let c = &row[depth];
    if depth + 1 == row.len() {
        let start = offset + c.lo;
        return v[start..start + c.pmf.len()]
            .iter()
            .zip(&c.pmf)
            .map(|(x, w)| x * w)
            .sum();
    }
    c.pmf
        .iter()
        .enumerate()
        .map(|(t, w)| {
            w * dot_product(
                row,
                strides,
                depth + 1,
                offset + (c.lo + t) * strides[depth],
                v,
            )
        })
        .sum()
}

pub(crate) fn xlnx(w: f64) -> f64 {
    if w > 0.0 {
        w * w.ln()
    } else {
        0.0
    }
}

/// Poisson pmf window `[lo, hi]` leaving at most `tail` outside, renormalised.
/// Returns `lo`, the pmf on `lo..lo + len` and the dropped mass.
pub(crate) fn poisson_window(lambda: f64, tail: f64) -> (usize, Vec<f64>, f64) {
    if lambda == 0.0 {
        return (0, vec![1.0], 0.0);
    }
    let hi = poisson_upper_quantile(lambda, 0.5 * tail) as usize;
    let mut lo = 0usize;
    let mut below = 0.0;
    while lo < hi {
        let p = poisson_ln_pmf(lo as u64, lambda).exp();
        if below + p > 0.5 * tail {
            break;
        }
        below += p;
        lo += 1;
    }
    let mut pmf: Vec<f64> = (lo..=hi)
        .map(|y| poisson_ln_pmf(y as u64, lambda).exp())
        .collect();
    let kept: f64 = pmf.iter().sum();
    for w in &mut pmf {
        *w /= kept;
    }
    (lo, pmf, (1.0 - kept).max(0.0))
}

fn x_grid(cons: &ConstraintSet, size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!(
            "x grid needs at least 2 points, got {size}"
        )));
    }
    Ok((0..size)
        .map(|k| cons.peak * k as f64 / (size - 1) as f64)
        .collect())
}

fn product_channel(
    inputs: Vec<InputSymbol>,
    means: Vec<Vec<f64>>,
    trunc: &Truncation,
) -> Result<DiscreteChannel> {
    let n = means[0].len();
    let per_coord = trunc.y_tail_mass / n as f64;
    let mut dims = vec![1usize; n];
    let mut rows = Vec::with_capacity(means.len());
    let mut dropped = Vec::with_capacity(means.len());
    let mut neg_entropy = Vec::with_capacity(means.len());
    for row_means in &means {
        let mut coords = Vec::with_capacity(n);
        let mut kept = 1.0;
        let mut ne = 0.0;
        for (i, &lam) in row_means.iter().enumerate() {
            let (lo, pmf, lost) = poisson_window(lam, per_coord);
            kept *= 1.0 - lost;
            ne += pmf.iter().map(|&v| xlnx(v)).sum::<f64>();
            dims[i] = dims[i].max(lo + pmf.len());
            coords.push(CoordPmf { lo, pmf });
        }
        rows.push(coords);
        dropped.push(1.0 - kept);
        neg_entropy.push(ne);
    }
    let size = dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
        .unwrap_or(u64::MAX);
    if size > trunc.alphabet_cap {
        return Err(Error::AlphabetTooLarge {
            size,
            cap: trunc.alphabet_cap,
        });
    }
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let costs = inputs.iter().map(|s| s.x).collect();
    Ok(DiscreteChannel {
        inputs,
        costs,
        law: Law::Product {
            dims,
            strides,
            rows,
        },
        neg_entropy,
        tail_mass_dropped: dropped,
    })
}

/// JTAC channel: inputs are a uniform concentration grid on `[0, M]` times
/// every release time, outputs are the count vectors `(Y_1, …, Y_n)`.
///
/// The zero concentration is listed once, since its release time is not
/// observable.
pub fn discretize_jtac(
    a: &ArrivalMatrix,
    cons: &ConstraintSet,
    x_grid_size: usize,
    lambda0: f64,
    trunc: &Truncation,
) -> Result<DiscreteChannel> {
    let grid = x_grid(cons, x_grid_size)?;
    let mut inputs = Vec::new();
    let mut means = Vec::new();
    for &x in &grid {
        for j in 0..a.releases() {
            if x == 0.0 && j > 0 {
                continue;
            }
            inputs.push(InputSymbol {
                x,
                release: Some(j),
            });
            means.push(
                (1..=a.intervals())
                    .map(|i| x * a.get(i, j) + lambda0)
                    .collect(),
            );
        }
    }
    product_channel(inputs, means, trunc)
}

/// Concentration-only channel: release at time 0, output is the total count
/// `Y_1 + … + Y_n ~ Poisson(x p′_0 + n λ₀)`.
pub fn discretize_cb(
    a: &ArrivalMatrix,
    cons: &ConstraintSet,
    x_grid_size: usize,
    lambda0: f64,
    trunc: &Truncation,
) -> Result<DiscreteChannel> {
    let grid = x_grid(cons, x_grid_size)?;
    let noise = a.intervals() as f64 * lambda0;
    let inputs = grid
        .iter()
        .map(|&x| InputSymbol {
            x,
            release: Some(0),
        })
        .collect();
    let means = grid
        .iter()
        .map(|&x| vec![x * a.col_sum(0) + noise])
        .collect();
    product_channel(inputs, means, trunc)
}

/// Channel with a fixed concentration and the release time as input,
/// observed through one sub-interval.
pub(crate) fn timing_channel(
    a: &ArrivalMatrix,
    i: usize,
    x: f64,
    lambda0: f64,
    trunc: &Truncation,
) -> Result<DiscreteChannel> {
    let inputs = (0..a.releases())
        .map(|j| InputSymbol {
            x,
            release: Some(j),
        })
        .collect();
    let means = (0..a.releases())
        .map(|j| vec![x * a.get(i, j) + lambda0])
        .collect();
    product_channel(inputs, means, trunc)
}
