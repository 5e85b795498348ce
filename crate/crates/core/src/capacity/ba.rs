//! Blahut-Arimoto for capacity and capacity-cost.

use super::discrete::{xlnx, DiscreteChannel};
use crate::bounds::Rate;
use crate::error::{Error, Result};

// Outputs never reached by the current input law still need a finite log.
const Q_FLOOR: f64 = 1e-300;
const MAX_RELAXATION: f64 = 64.0;
// Relaxed steps may not starve an input beyond recovery.
const MAX_LOG_STEP: f64 = 30.0;
const P_FLOOR: f64 = 1e-200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaOptions {
    /// Target gap (nats) between the certified upper bound and the reported
    /// capacity.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// `I(p)` at the returned input law; always achievable.
    pub capacity: Rate,
    /// Certified upper bound on the (constrained) capacity.
    pub upper: Rate,
    pub input_distribution: Vec<f64>,
    pub iterations: usize,
    pub gap: f64,
    /// Cost multiplier `s` of the best upper bound; zero when the cost cap is
    /// inactive.
    pub multiplier: f64,
    pub achieved_mean_cost: f64,
}

struct Workspace {
    q: Vec<f64>,
    ln_q: Vec<f64>,
    d: Vec<f64>,
    q_sum: f64,
    q_lnq_sum: f64,
}

impl Workspace {
    fn new(ch: &DiscreteChannel) -> Self {
        Self {
            q: Vec::with_capacity(ch.output_count()),
            ln_q: vec![0.0; ch.output_count()],
            d: vec![0.0; ch.input_count()],
            q_sum: 0.0,
            q_lnq_sum: 0.0,
        }
    }

    /// Fills `d` with `D(W_k ‖ q_p)` and returns `I(p)`.
    fn evaluate(&mut self, ch: &DiscreteChannel, p: &[f64]) -> f64 {
        ch.output_distribution(p, &mut self.q);
        let (mut sum, mut qlnq) = (0.0, 0.0);
        for (l, &q) in self.ln_q.iter_mut().zip(&self.q) {
            *l = q.max(Q_FLOOR).ln();
            sum += q;
            if q > 0.0 {
                qlnq += q * *l;
            }
        }
        self.q_sum = sum;
        self.q_lnq_sum = qlnq;
        ch.divergences(&self.ln_q, &mut self.d);
        p.iter().zip(&self.d).map(|(pk, dk)| pk * dk).sum()
    }
}

/// `min_{s ≥ 0} max_k (d_k − s c_k) + s·cap` and its minimiser. For any
/// output law behind `d` this bounds the capacity-cost value from above.
fn certificate(d: &[f64], costs: &[f64], cap: Option<f64>) -> (f64, f64) {
    let g = |s: f64| {
        let (mut best, mut cost) = (f64::NEG_INFINITY, 0.0);
        for (dk, ck) in d.iter().zip(costs) {
            let v = dk - s * ck;
            if v > best {
                best = v;
                cost = *ck;
            }
        }
        (best, cost)
    };
    let Some(cap) = cap else {
        return (g(0.0).0, 0.0);
    };
    // g is convex and piecewise linear with slope cap − c_{argmax}
    if g(0.0).1 <= cap {
        return (g(0.0).0, 0.0);
    }
    let mut hi = 1.0;
    while g(hi).1 > cap && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid).1 > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (vlo, vhi) = (g(lo).0 + lo * cap, g(hi).0 + hi * cap);
    if vlo <= vhi {
        (vlo, lo)
    } else {
        (vhi, hi)
    }
}

/// Multiplicative update `p_k ∝ p_k e^{γ(d_k − s c_k)}`, with `s ≥ 0` the
/// smallest multiplier that keeps the mean cost within `cap`. A log-step
/// floor keeps momentarily poor inputs recoverable.
fn multiplicative_step(
    p: &[f64],
    d: &[f64],
    costs: &[f64],
    cap: Option<f64>,
    gamma: f64,
    out: &mut [f64],
) -> Result<()> {
    let fill = |s: f64, out: &mut [f64]| -> f64 {
        let top = d
            .iter()
            .zip(costs)
            .map(|(dk, ck)| dk - s * ck)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut norm = 0.0;
        for (((o, pk), dk), ck) in out.iter_mut().zip(p).zip(d).zip(costs) {
            *o = (pk * (gamma * (dk - s * ck - top)).max(-MAX_LOG_STEP).exp()).max(P_FLOOR);
            norm += *o;
        }
        let mut cost = 0.0;
        for (o, ck) in out.iter_mut().zip(costs) {
            *o /= norm;
            cost += *o * ck;
        }
        cost
    };
    let Some(cap) = cap else {
        fill(0.0, out);
        return Ok(());
    };
    if fill(0.0, out) <= cap {
        return Ok(());
    }
    let mut hi = 1.0;
    while fill(hi, out) > cap {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Solver("cost multiplier bracket not found".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fill(mid, out) > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    fill(hi, out);
    Ok(())
}

/// Input law the vertex step moves towards: `e_k`, or when `k` alone is too
/// expensive, its mix with the cheapest input that costs exactly `cap`.
fn vertex_target(
    k: usize,
    cheapest: usize,
    costs: &[f64],
    cap: Option<f64>,
) -> (usize, usize, f64) {
    match cap {
        Some(cap) if costs[k] > cap => {
            let theta = (cap - costs[cheapest]) / (costs[k] - costs[cheapest]);
            (k, cheapest, theta)
        }
        _ => (k, k, 1.0),
    }
}

/// Merges two sorted sparse rows into `θ·u + (1 − θ)·v`.
fn blend(u: &[(usize, f64)], v: &[(usize, f64)], theta: f64) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(u.len().max(v.len()));
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < v.len() {
        let take_u = j == v.len() || (i < u.len() && u[i].0 <= v[j].0);
        let take_v = i == u.len() || (j < v.len() && v[j].0 <= u[i].0);
        let y = if take_u { u[i].0 } else { v[j].0 };
        let mut w = 0.0;
        if take_u {
            w += theta * u[i].1;
            i += 1;
        }
        if take_v {
            w += (1.0 - theta) * v[j].1;
            j += 1;
        }
        out.push((y, w));
    }
    out
}

/// Line search for `max_t I((1 − t)p + t·v)` with `v = θ e_a + (1 − θ) e_b`.
/// `ws` must hold the output law of `p`.
///
/// Off the support `S` of `v` the output law only scales by `1 − t`, so the
/// slope needs `S` plus two sums over the rest:
/// `I'(t) = A − Σ_S (v_y − q_y) ln q_t(y) + Σ_{∉S} q ln q + Q_∉S ln(1 − t)`.
fn vertex_step_length(
    ch: &DiscreteChannel,
    p: &[f64],
    target: (usize, usize, f64),
    ws: &Workspace,
) -> f64 {
    let (a, b, theta) = target;
    let (v, target_ne) = if a == b {
        (ch.sparse_row(a), ch.neg_entropy(a))
    } else {
        (
            blend(&ch.sparse_row(a), &ch.sparse_row(b), theta),
            theta * ch.neg_entropy(a) + (1.0 - theta) * ch.neg_entropy(b),
        )
    };
    let mut drift = target_ne;
    for (j, pj) in p.iter().enumerate() {
        drift -= pj * ch.neg_entropy(j);
    }
    let (mut q_in, mut qlnq_in) = (0.0, 0.0);
    for &(y, _) in &v {
        q_in += ws.q[y];
        qlnq_in += xlnx(ws.q[y]);
    }
    let q_out = (ws.q_sum - q_in).max(0.0);
    drift += ws.q_lnq_sum - qlnq_in;

    // returns (I'(t), I''(t))
    let slope = |t: f64| -> (f64, f64) {
        let (mut g, mut h) = (drift, 0.0);
        for &(y, vy) in &v {
            let diff = vy - ws.q[y];
            let qt = ws.q[y] + t * diff;
            g -= diff * qt.ln();
            h -= diff * diff / qt;
        }
        if q_out > 0.0 {
            g += q_out * (1.0 - t).ln();
            h -= q_out / (1.0 - t);
        }
        (g, h)
    };
    if !(slope(0.0).0 > 0.0) {
        return 0.0;
    }
    if q_out == 0.0 && slope(1.0).0 >= 0.0 {
        return 1.0;
    }
    // safeguarded Newton on the decreasing slope
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut t = 0.5;
    for _ in 0..60 {
        let (g, h) = slope(t);
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo < 1e-12 || g.abs() < 1e-13 {
            break;
        }
        let newton = t - g / h;
        t = if h < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    lo.max(t.min(hi))
}

/// Capacity of `ch`, or its capacity-cost value at `E[cost] ≤ cost_cap`.
///
/// Every iterate is feasible, so `I(p)` is achievable. Each step is a
/// multiplicative update whose cost multiplier is re-solved so the cap holds,
/// over-relaxed while `I` keeps increasing, followed by an exact line search
/// towards the input with the largest penalised divergence; the latter
/// revives inputs the multiplicative steps have starved. The run stops once
/// `I(p)` is within `tol` of the best certificate
/// `min_s max_k (D_k − s c_k) + s·cap` seen so far.
pub fn blahut_arimoto(
    ch: &DiscreteChannel,
    cost_cap: Option<f64>,
    opts: &BaOptions,
) -> Result<CapacityResult> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "BA needs tol > 0 and max_iter > 0".into(),
        ));
    }
    let n = ch.input_count();
    let costs = ch.costs();
    let mean_cost = |p: &[f64]| p.iter().zip(costs).map(|(pk, ck)| pk * ck).sum::<f64>();
    let cheapest = (0..n).fold(0, |b, k| if costs[k] < costs[b] { k } else { b });
    let priciest = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cap = match cost_cap {
        Some(c) if c < priciest => Some(c),
        _ => None,
    };

    let mut p = vec![1.0 / n as f64; n];
    if let Some(cap) = cap {
        let cmin = costs[cheapest];
        if cap <= cmin {
            return Err(Error::Infeasible(format!(
                "cost cap {cap} leaves no room above the cheapest input ({cmin})"
            )));
        }
        let mu = mean_cost(&p);
        if mu > cap {
            let theta = (cap - cmin) / (mu - cmin);
            for pk in p.iter_mut() {
                *pk *= theta;
            }
            p[cheapest] += 1.0 - theta;
        }
    }

    let mut ws = Workspace::new(ch);
    let mut trial = vec![0.0; n];
    let mut d_here = vec![0.0; n];
    let mut mi = ws.evaluate(ch, &p);
    let mut best_upper = f64::INFINITY;
    let mut multiplier = 0.0;
    let mut gamma = 1.0;
    let mut iterations = 0;
    loop {
        let (upper, s) = certificate(&ws.d, costs, cap);
        if upper < best_upper {
            best_upper = upper;
            multiplier = s;
        }
        let gap = best_upper - mi;
        if gap <= opts.tol {
            return Ok(CapacityResult {
                capacity: Rate(mi),
                upper: Rate(best_upper),
                achieved_mean_cost: mean_cost(&p),
                input_distribution: p,
                iterations,
                gap,
                multiplier,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence { iterations, gap });
        }
        iterations += 1;

        let k = (0..n).fold(0, |b, k| {
            if ws.d[k] - s * costs[k] > ws.d[b] - s * costs[b] {
                k
            } else {
                b
            }
        });
        let target = vertex_target(k, cheapest, costs, cap);
        let t = vertex_step_length(ch, &p, target, &ws);
        if t > 0.0 {
            let (a, b, theta) = target;
            for pk in p.iter_mut() {
                *pk *= 1.0 - t;
            }
            p[a] += t * theta;
            p[b] += t * (1.0 - theta);
            mi = ws.evaluate(ch, &p);
        }

        d_here.copy_from_slice(&ws.d);
        loop {
            multiplicative_step(&p, &d_here, costs, cap, gamma, &mut trial)?;
            let trial_mi = ws.evaluate(ch, &trial);
            if gamma == 1.0 || trial_mi >= mi {
                p.copy_from_slice(&trial);
                mi = trial_mi;
                gamma = (gamma * 2.0).min(MAX_RELAXATION);
                break;
            }
            gamma = 1.0;
        }
    }
}

/// Exact `I(X; Y)` for the given input law.
pub fn mutual_information(ch: &DiscreteChannel, input_dist: &[f64]) -> Result<Rate> {
    if input_dist.len() != ch.input_count() {
        return Err(Error::InvalidParameter(
            "input law has the wrong length".into(),
        ));
    }
    let total: f64 = input_dist.iter().sum();
    if input_dist.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "input law sums to {total}"
        )));
    }
    let mut ws = Workspace::new(ch);
    Ok(Rate(ws.evaluate(ch, input_dist)))
}
