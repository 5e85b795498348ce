//! Checks that both the module tests and the acceptance run use. Each
//! returns a one-line summary on success and the first violation otherwise.

use jtac::bounds::*;
use jtac::capacity::{blahut_arimoto, BaOptions, DiscreteChannel};
use jtac::channel::{arrival_prob, ArrivalMatrix, ChannelParams};
use jtac::specfun::*;
use jtac_oracle::{gauss_hermite, integrate, series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// 200 random `(i, j, c, t_b, σ_x)` against quadrature of the Lévy density.
pub fn arrival_tuples() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let m = rng.random_range(1..=8);
        let t_b = rng.random_range(0.05..3.0);
        let c = 10f64.powf(rng.random_range(-2.0..1.0));
        let ts = n as f64 * t_b;
        let window = ts * rng.random_range(0.0..1.0);
        let step = if m > 1 {
            window / (m - 1) as f64 * rng.random_range(0.0..1.0)
        } else {
            0.0
        };
        let params =
            ChannelParams::new(c, ts, n, m, step, window, 0.0).map_err(|e| e.to_string())?;
        let i = rng.random_range(1..=n);
        let j = rng.random_range(0..m);
        let got = arrival_prob(i, j, &params);
        let want = arrival_quad(i, j as f64 * step, c, params.interval_width);
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err <= 1e-8, || {
            format!("p_{i}{j} at c={c}, t_b={t_b}, σ_x={step}: {got} vs quadrature {want}")
        })?;
    }
    Ok(format!("200 tuples, worst abs error {worst:.1e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// erf, Ei, ₂F₂ and Poisson entropy on fixed grids.
pub fn special_functions() -> Check {
    let mut counts = [0usize; 4];
    for k in 0..=40 {
        let x = -5.0 + 0.25 * k as f64;
        let want = if x.abs() <= 3.0 {
            series::erf_taylor(x, 1e-17)
        } else {
            series::erf_quad(x)
        };
        ensure((erf(x) - want).abs() <= 1e-12, || {
            format!("erf({x}) = {} vs {want}", erf(x))
        })?;
        counts[0] += 1;
    }
    let mut ei_points: Vec<f64> = Vec::new();
    for e in -6..=2 {
        for &s in &[1.0, 3.0] {
            let x = s * 10f64.powi(e);
            if x <= 700.0 {
                ei_points.push(x);
                ei_points.push(-x);
            }
        }
    }
    ei_points.extend([250.0, 500.0, 699.0, -250.0, -699.0]);
    for &x in &ei_points {
        let got = expint_ei(x).map_err(|e| e.to_string())?;
        let want = if x < -1.0 {
            -series::e1_quad(-x)
        } else {
            series::ei_quad(x)
        };
        ensure(rel(got, want) <= 1e-10, || {
            format!("Ei({x}) = {got} vs {want}")
        })?;
        counts[1] += 1;
    }
    for k in 0..=24 {
        let x = -60.0 + 2.75 * k as f64;
        let got = hyp2f2_half(x).map_err(|e| e.to_string())?;
        let want = if x >= -10.0 {
            series::hyp2f2_series(x, 1e-17)
        } else {
            series::hyp2f2_quad(x)
        };
        ensure(rel(got, want) <= 1e-10, || {
            format!("2F2({x}) = {got} vs {want}")
        })?;
        counts[2] += 1;
    }
    for k in 0..=24 {
        let lambda = if k == 0 {
            0.0
        } else {
            1e-3 * 1.5f64.powi(k * 3 / 2)
        };
        let lambda = lambda.min(1000.0);
        let got = poisson_entropy(lambda);
        let want = poisson_entropy_brute(lambda);
        ensure((got - want).abs() <= 1e-10, || {
            format!("H(Poisson({lambda})) = {got} vs {want}")
        })?;
        counts[3] += 1;
    }
    let gauss = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 1000.0).ln();
    ensure((poisson_entropy(1000.0) - gauss).abs() <= 1e-3, || {
        "H(Poisson(1000)) far from Gaussian".into()
    })?;
    Ok(format!(
        "erf {} pts, Ei {} pts, 2F2 {} pts, Poisson entropy {} pts",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

pub fn gaussian_moment_by_hermite(k: u32, mean: f64, variance: f64) -> f64 {
    let (x, w) = gauss_hermite(40);
    let s = (2.0 * variance).sqrt();
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| wi * (mean + s * xi).powi(k as i32))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt()
}

/// Root residuals and the normalisation and mean of the implied densities.
pub fn root_solvers() -> Check {
    let peak = 10.0;
    for k in 1..=9 {
        let alpha = 0.05 * k as f64;
        let root = solve_mu(alpha, 1e-10).map_err(|e| e.to_string())?;
        ensure(root.residual <= 1e-10, || {
            format!("mu residual {} at alpha {alpha}", root.residual)
        })?;
        let norm = (std::f64::consts::PI * peak).sqrt() * g_mu(root.mu);
        let d = density_moments(
            |x: f64| x.powf(-0.5) * (-root.mu * x / peak).exp() / norm,
            peak,
        );
        ensure((d.mass - 1.0).abs() <= 1e-8, || {
            format!("mu density mass {} at alpha {alpha}", d.mass)
        })?;
        ensure((d.mean - alpha * peak).abs() <= 1e-6, || {
            format!("mu density mean {} at alpha {alpha}", d.mean)
        })?;
    }
    for &(peak, alpha, p_star) in &PHI_CASES {
        let cons = ConstraintSet::from_ratio(peak, alpha).map_err(|e| e.to_string())?;
        let r = solve_phi(&cons, p_star, 1e-10).map_err(|e| e.to_string())?;
        ensure(r.residual <= 1e-10, || {
            format!("phi residual {}", r.residual)
        })?;
        let b = 12.0 * p_star;
        let f = |x: f64| r.c_prime * (r.phi * x).exp() / (b * x + 1.0);
        let mass = integrate(f, 0.0, peak, 1e-300, 1e-14);
        let mean = integrate(|x| x * f(x), 0.0, peak, 1e-300, 1e-14);
        ensure((mass - 1.0).abs() <= 1e-8, || {
            format!("phi density mass {mass} at {peak}/{alpha}/{p_star}")
        })?;
        ensure((mean - cons.mean).abs() <= 1e-6, || {
            format!("phi density mean {mean} at {peak}/{alpha}/{p_star}")
        })?;
    }
    Ok(format!(
        "mu at 9 ratios, phi at {} configs",
        PHI_CASES.len()
    ))
}

/// (c, n, m, M, E_m/M)
pub const BOUND_POINTS: [(f64, usize, usize, f64, f64); 5] = [
    (1.0, 4, 4, 15.0, 0.2),
    (2.0, 3, 5, 10.0, 0.2),
    (0.5, 2, 3, 20.0, 0.1),
    (1.0, 8, 4, 15.0, 0.2),
    (3.0, 5, 6, 12.0, 0.3),
];

/// (M, E_m/M, p*)
pub const PHI_CASES: [(f64, f64, f64); 10] = [
    (15.0, 0.2, 0.5),
    (10.0, 0.2, 0.3),
    (20.0, 0.1, 0.8),
    (5.0, 0.4, 0.2),
    (10.0, 0.6, 0.5),
    (8.0, 0.05, 0.9),
    (30.0, 0.25, 0.1),
    (12.0, 0.5, 0.05),
    (15.0, 0.33, 0.6),
    (2.0, 0.2, 0.4),
];

pub fn bound_setup(
    &(c, n, m, peak, alpha): &(f64, usize, usize, f64, f64),
) -> (ArrivalMatrix, ConstraintSet) {
    let params = ChannelParams::new(c, 10.0, n, m, 5.0 / m as f64, 5.0, 0.1).unwrap();
    (
        ArrivalMatrix::new(&params),
        ConstraintSet::from_ratio(peak, alpha).unwrap(),
    )
}

pub fn crate_mixture(comps: &[(f64, f64, f64)], y0: f64) -> f64 {
    let comps: Vec<GaussianComponent> = comps
        .iter()
        .map(|&(weight, mean, variance)| GaussianComponent {
            weight,
            mean,
            variance,
        })
        .collect();
    mixture_entropy_lower(&comps, y0, 4).unwrap().value
}

/// Every lower bound against its quadrature re-assembly.
pub fn bound_rederivation() -> Check {
    let cfg = BoundConfig::default();
    let mut worst: f64 = 0.0;
    for pt in &BOUND_POINTS {
        let (a, cons) = bound_setup(pt);
        let p = rows_of(&a);
        let m = pt.2 as f64;

        let lb1 = lower_bound_1(&a, &cons, &cfg).map_err(|e| e.to_string())?;
        let o1 = lb1_oracle(&p, cons.mean, cons.peak, lb1.mu.mu);
        let lb2 = lower_bound_2(&a, &cons, &cfg).map_err(|e| e.to_string())?;
        let o2 = lb2_r2_oracle(&p, cons.mean, cons.peak, lb2.phi.phi);
        let o1b = o2 + m - m.ln() - 1.0;
        let lb3 = lower_bound_3(&a, &cons, &cfg).map_err(|e| e.to_string())?;
        let o3 = lb3_oracle(&p, cons.mean, cons.peak, lb3.density.u, crate_mixture);
        for (name, got, want) in [
            ("lb1", lb1.rate.0, o1),
            ("lb2 R1", lb2.r1.0, o1b),
            ("lb2 R2", lb2.r2.0, o2),
            ("lb3", lb3.rate.0, o3),
        ] {
            let err = (got - want).abs();
            worst = worst.max(err);
            ensure(err <= 1e-6, || {
                format!("{name} at {pt:?}: {got} vs re-assembly {want}")
            })?;
        }
    }
    Ok(format!(
        "lb1, lb2 (R1, R2), lb3 at 5 configs, worst {worst:.1e} nats"
    ))
}

pub type MixtureCase = (Vec<(f64, f64, f64)>, f64, u32);

/// 50 random mixtures under a fixed seed: (components, y0, Taylor order).
pub fn mixture_suite() -> Vec<MixtureCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..50)
        .map(|_| {
            let k = rng.random_range(1..=6);
            let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            w[k - 1] = 1.0 - w[..k - 1].iter().sum::<f64>();
            let spread = rng.random_range(0.5..8.0);
            let comps: Vec<_> = w
                .iter()
                .map(|&wi| {
                    (
                        wi,
                        rng.random_range(-spread..spread),
                        rng.random_range(0.2..4.0),
                    )
                })
                .collect();
            let y0 = comps[0].1;
            let order = 2 * rng.random_range(1..=3u32);
            (comps, y0, order)
        })
        .collect()
}

pub fn mixture_soundness() -> Check {
    let mut min_slack = f64::INFINITY;
    for (comps, y0, order) in mixture_suite() {
        let gc: Vec<GaussianComponent> = comps
            .iter()
            .map(|&(weight, mean, variance)| GaussianComponent {
                weight,
                mean,
                variance,
            })
            .collect();
        let lower = mixture_entropy_lower(&gc, y0, order)
            .map_err(|e| e.to_string())?
            .value;
        let exact = mixture_entropy_quad(&comps);
        min_slack = min_slack.min(exact - lower);
        ensure(lower <= exact + 1e-6, || {
            format!("{comps:?}: {lower} above quadrature {exact}")
        })?;
    }
    Ok(format!("50 mixtures, smallest margin {min_slack:.2e} nats"))
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// BSC, BEC, and a loose cost cap on a small JTAC channel.
pub fn blahut_arimoto_reference() -> Check {
    let opts = BaOptions {
        tol: 1e-9,
        ..Default::default()
    };
    let bsc = DiscreteChannel::from_rows(vec![vec![0.89, 0.11], vec![0.11, 0.89]], vec![0.0, 1.0])
        .map_err(|e| e.to_string())?;
    let c = blahut_arimoto(&bsc, None, &opts)
        .map_err(|e| e.to_string())?
        .capacity
        .bits();
    let want = 1.0 - h2(0.11);
    ensure((c - want).abs() <= 1e-6, || {
        format!("BSC(0.11): {c} bits vs {want}")
    })?;
    ensure((c - 0.500084).abs() <= 1e-6, || {
        format!("BSC(0.11): {c} bits vs 0.500084")
    })?;

    let bec = DiscreteChannel::from_rows(
        vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5]],
        vec![0.0, 1.0],
    )
    .map_err(|e| e.to_string())?;
    let c = blahut_arimoto(&bec, None, &opts)
        .map_err(|e| e.to_string())?
        .capacity
        .bits();
    ensure((c - 0.5).abs() <= 1e-6, || format!("BEC(0.5): {c} bits"))?;

    let params = ChannelParams::new(1.0, 4.0, 2, 3, 1.0, 2.0, 0.1).map_err(|e| e.to_string())?;
    let a = ArrivalMatrix::new(&params);
    let cons = ConstraintSet::from_ratio(8.0, 0.2).map_err(|e| e.to_string())?;
    let ch = jtac::capacity::discretize_jtac(&a, &cons, 8, 0.1, &Default::default())
        .map_err(|e| e.to_string())?;
    let tol = 1e-7;
    let o = BaOptions {
        tol,
        ..Default::default()
    };
    let free = blahut_arimoto(&ch, None, &o)
        .map_err(|e| e.to_string())?
        .capacity
        .0;
    let capped = blahut_arimoto(&ch, Some(cons.peak), &o)
        .map_err(|e| e.to_string())?
        .capacity
        .0;
    ensure((free - capped).abs() <= 2.0 * tol, || {
        format!("cap = M: {capped} vs unconstrained {free}")
    })?;
    Ok(format!(
        "BSC {:.6} bits, BEC 0.5 bits, cap = M within 2 tol",
        want
    ))
}

pub fn table1_cli() -> Check {
    let out = jtac(&["table1"]);
    ensure(out.status.success(), || {
        format!("jtac table1 exited with {}", out.status)
    })?;
    let text = String::from_utf8_lossy(&out.stdout);
    let listed = [
        (0.1, 4800.0),
        (1.0, 480.0),
        (2.0, 240.0),
        (3.0, 160.0),
        (4.0, 120.0),
        (5.0, 96.0),
    ];
    let mut seen = 0;
    for line in text.lines() {
        let f: Vec<f64> = line
            .split_whitespace()
            .filter_map(|t| t.parse().ok())
            .collect();
        if f.len() != 5 {
            continue;
        }
        let (c, d, c_full) = (f[0], f[1], f[2]);
        let Some(&(lc, ld)) = listed.iter().find(|p| p.0 == c && p.1 == d) else {
            continue;
        };
        let mine = 21.91f64.powi(2) / ld;
        ensure(((mine - lc) / lc).abs() <= 2e-3, || {
            format!("d²/D = {mine} vs listed c = {lc}")
        })?;
        ensure(((c_full - mine) / mine).abs() <= 1e-4, || {
            format!("printed d²/D {c_full} vs {mine}")
        })?;
        seen += 1;
    }
    ensure(seen == 6, || {
        format!("found {seen} of 6 (c, D) rows in:\n{text}")
    })?;
    ensure(text.contains("factor-2"), || {
        "no factor-2 discrepancy note".into()
    })?;
    Ok("6 (c, D) pairs within 0.2% via d²/D, factor-2 note printed".into())
}
