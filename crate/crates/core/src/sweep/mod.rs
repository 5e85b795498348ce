//! Experiment configs, parameter sweeps and their CSV/SVG output.

mod config;
mod csv_out;
mod svg;
mod table1;

pub use config::{ExperimentConfig, Method, Numerics, OutputFormat, SweepPoint, SweepVariable};
pub use csv_out::{emit_csv, render_csv};
pub use svg::{emit_svg_plot, render_svg, PlotStyle};

pub use table1::{table1, table1_report, Table1Row, TABLE1_DISTANCE};

use rayon::prelude::*;

use crate::bounds::{lower_bound_1, lower_bound_2, lower_bound_3, upper_bound, Rate};
use crate::capacity::{blahut_arimoto, discretize_cb, discretize_jtac, tb_rate, CapacityResult};
use crate::channel::ArrivalMatrix;
use crate::error::{Error, Result};

/// Rate columns are converted on output; the rest are written as stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Rate,
    Real,
    Count,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
    /// Method whose curve this column is, for plotting.
    pub curve: Option<Method>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateUnit {
    Bits,
    Nats,
}

impl RateUnit {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            RateUnit::Bits => Rate(nats).bits(),
            RateUnit::Nats => nats,
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            RateUnit::Bits => "rate (bits/channel use)",
            RateUnit::Nats => "rate (nats/channel use)",
        }
    }
}

/// One sweep point. Rates are held in nats; a failed method leaves its cells
/// empty and is named in `status`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub cells: Vec<Option<f64>>,
    /// `ok`, or `; `-separated `infeasible:<method>: <reason>` and
    /// `error:<method>: <reason>` entries.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn has_numerical_error(&self) -> bool {
        self.status.split("; ").any(|s| s.starts_with("error:"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of one column in sweep order, in nats for rate columns.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.cells[k]).collect())
    }
}

fn col(name: &str, kind: ColumnKind) -> Column {
    Column {
        name: name.to_string(),
        kind,
        curve: None,
    }
}

fn curve(m: Method) -> Column {
    Column {
        name: m.name().to_string(),
        kind: ColumnKind::Rate,
        curve: Some(m),
    }
}

fn method_columns(m: Method) -> Vec<Column> {
    match m {
        Method::Lb2 => vec![
            col("lb2_r1", ColumnKind::Rate),
            col("lb2_r2", ColumnKind::Rate),
            curve(m),
        ],
        _ => vec![curve(m)],
    }
}

fn diagnostic_columns(m: Method) -> Vec<Column> {
    use ColumnKind::*;
    match m {
        Method::Lb1 => vec![
            col("lb1_clamped", Rate),
            col("mu", Real),
            col("lb1_interval", Count),
        ],
        Method::Lb2 => vec![
            col("lb2_clamped", Rate),
            col("phi", Real),
            col("lb2_interval", Count),
        ],
        Method::Lb3 => vec![
            col("lb3_clamped", Rate),
            col("u", Real),
            col("lb3_interval", Count),
        ],
        Method::Ub => vec![],
        Method::BaJtac => vec![
            col("ba_jtac_upper", Rate),
            col("ba_jtac_gap", Rate),
            col("ba_jtac_iterations", Count),
        ],
        Method::BaCb => vec![
            col("ba_cb_upper", Rate),
            col("ba_cb_gap", Rate),
            col("ba_cb_iterations", Count),
        ],
        Method::Tb => vec![col("tb_interval", Count)],
    }
}

/// Column layout of a config: method columns in config order, then the
/// Lévy scale (and diffusion coefficient when geometry drives it), then each
/// method's diagnostics.
pub fn columns(cfg: &ExperimentConfig) -> Vec<Column> {
    let mut out: Vec<Column> = cfg
        .methods
        .iter()
        .flat_map(|&m| method_columns(m))
        .collect();
    out.push(col("c", ColumnKind::Real));
    if cfg.points.iter().any(|p| p.diffusion.is_some()) {
        out.push(col("diffusion", ColumnKind::Real));
    }
    out.extend(cfg.methods.iter().flat_map(|&m| diagnostic_columns(m)));
    out
}

struct PointCells {
    methods: Vec<Option<f64>>,
    diagnostics: Vec<Option<f64>>,
    failures: Vec<String>,
}

impl PointCells {
    fn record<T>(
        &mut self,
        m: Method,
        r: Result<T>,
        fill: impl FnOnce(&T) -> (Vec<f64>, Vec<f64>),
    ) {
        let n_main = method_columns(m).len();
        let n_diag = diagnostic_columns(m).len();
        let outcome = r.and_then(|v| {
            let (main, diag) = fill(&v);
            if main.iter().chain(&diag).all(|x| x.is_finite()) {
                Ok((main, diag))
            } else {
                Err(Error::Instability(format!(
                    "{} produced a non-finite value",
                    m.name()
                )))
            }
        });
        match outcome {
            Ok((main, diag)) => {
                debug_assert_eq!((main.len(), diag.len()), (n_main, n_diag));
                self.methods.extend(main.into_iter().map(Some));
                self.diagnostics.extend(diag.into_iter().map(Some));
            }
            Err(e) => {
                let kind = if e.is_infeasibility() {
                    "infeasible"
                } else {
                    "error"
                };
                self.failures.push(format!("{kind}:{}: {e}", m.name()));
                self.methods.extend(std::iter::repeat_n(None, n_main));
                self.diagnostics.extend(std::iter::repeat_n(None, n_diag));
            }
        }
    }
}

fn ba_cells(r: &CapacityResult) -> (Vec<f64>, Vec<f64>) {
    (
        vec![r.capacity.0],
        vec![r.upper.0, r.gap, r.iterations as f64],
    )
}

fn evaluate_point(cfg: &ExperimentConfig, p: &SweepPoint) -> SweepRow {
    let num = &cfg.numerics;
    let a = ArrivalMatrix::new(&p.params);
    let cons = &p.constraints;
    let lambda0 = p.params.lambda0;
    let mut cells = PointCells {
        methods: Vec::new(),
        diagnostics: Vec::new(),
        failures: Vec::new(),
    };
    for &m in &cfg.methods {
        match m {
            Method::Lb1 => cells.record(m, lower_bound_1(&a, cons, &num.bounds), |r| {
                (
                    vec![r.rate.0],
                    vec![r.rate.clamped().0, r.mu.mu, r.interval as f64],
                )
            }),
            Method::Lb2 => cells.record(m, lower_bound_2(&a, cons, &num.bounds), |r| {
                let best = r.best();
                (
                    vec![r.r1.0, r.r2.0, best.0],
                    vec![best.clamped().0, r.phi.phi, r.interval as f64],
                )
            }),
            Method::Lb3 => cells.record(m, lower_bound_3(&a, cons, &num.bounds), |r| {
                (
                    vec![r.rate.0],
                    vec![r.rate.clamped().0, r.density.u, r.interval as f64],
                )
            }),
            Method::Ub => cells.record(m, upper_bound(&a, cons, lambda0), |r| (vec![r.0], vec![])),
            Method::BaJtac => {
                let r = discretize_jtac(&a, cons, num.x_grid_size, lambda0, &num.truncation)
                    .and_then(|ch| blahut_arimoto(&ch, Some(cons.mean), &num.ba));
                cells.record(m, r, ba_cells)
            }
            Method::BaCb => {
                let r = discretize_cb(&a, cons, num.x_grid_size, lambda0, &num.truncation)
                    .and_then(|ch| blahut_arimoto(&ch, Some(cons.mean), &num.ba));
                cells.record(m, r, ba_cells)
            }
            Method::Tb => {
                let x = num.tb_concentration.unwrap_or(cons.mean);
                let r = tb_rate(&a, x, lambda0, num.tb_input, &num.truncation, &num.ba);
                cells.record(m, r, |r| (vec![r.rate.0], vec![r.interval as f64]))
            }
        }
    }
    let mut row = cells.methods;
    row.push(Some(p.params.c));
    if cfg.points.iter().any(|q| q.diffusion.is_some()) {
        row.push(p.diffusion);
    }
    row.extend(cells.diagnostics);
    SweepRow {
        sweep_value: p.value,
        cells: row,
        status: if cells.failures.is_empty() {
            "ok".into()
        } else {
            cells.failures.join("; ")
        },
    }
}

/// Evaluates every selected method at every sweep point. Points run in
/// parallel; rows come back in sweep order.
pub fn run_sweep(cfg: &ExperimentConfig) -> SweepTable {
    let rows = cfg
        .points
        .par_iter()
        .map(|p| evaluate_point(cfg, p))
        .collect();
    SweepTable {
        variable: cfg.variable,
        columns: columns(cfg),
        rows,
    }
}
