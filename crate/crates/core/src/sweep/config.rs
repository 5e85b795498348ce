//! Experiment configuration files (TOML).
//!
//! A config names one channel, one constraint set, one swept variable and the
//! methods to evaluate at every sweep point. Every point is built and
//! validated before anything runs, so a bad grid is a config error rather than
//! a per-point failure.

use std::path::Path;

use serde::Deserialize;

use crate::bounds::{BoundConfig, ConstraintSet, Lb3Variant};
use crate::capacity::{BaOptions, TimingInput, Truncation, DEFAULT_ALPHABET_CAP};
use crate::channel::{ChannelGeometry, ChannelParams, ScaleRelation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lb1,
    Lb2,
    Lb3,
    Ub,
    BaJtac,
    BaCb,
    Tb,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lb1 => "lb1",
            Method::Lb2 => "lb2",
            Method::Lb3 => "lb3",
            Method::Ub => "ub",
            Method::BaJtac => "ba_jtac",
            Method::BaCb => "ba_cb",
            Method::Tb => "tb",
        }
    }

    /// Legend text for plots.
    pub fn label(self) -> &'static str {
        match self {
            Method::Lb1 => "lower bound, single sub-interval",
            Method::Lb2 => "lower bound, sum count",
            Method::Lb3 => "lower bound, adjacent difference",
            Method::Ub => "upper bound",
            Method::BaJtac => "JTAC capacity (BA)",
            Method::BaCb => "CB capacity (BA)",
            Method::Tb => "TB rate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "M")]
    Peak,
    #[serde(rename = "c")]
    LevyScale,
    #[serde(rename = "m")]
    Releases,
    #[serde(rename = "n")]
    Intervals,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Peak => "M",
            SweepVariable::LevyScale => "c",
            SweepVariable::Releases => "m",
            SweepVariable::Intervals => "n",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            SweepVariable::Peak => "peak concentration M (molecules)",
            SweepVariable::LevyScale => "Lévy scale c (s)",
            SweepVariable::Releases => "release times m",
            SweepVariable::Intervals => "receiver sub-intervals n",
        }
    }

    fn is_count(self) -> bool {
        matches!(self, SweepVariable::Releases | SweepVariable::Intervals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    title: Option<String>,
    note: Option<String>,
    methods: Vec<Method>,
    channel: RawChannel,
    constraints: RawConstraints,
    sweep: RawSweep,
    #[serde(default)]
    numerics: RawNumerics,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    c: Option<f64>,
    distance: Option<f64>,
    diffusion: Option<f64>,
    #[serde(default)]
    relation: ScaleRelation,
    symbol_period: f64,
    intervals: usize,
    releases: usize,
    release_window: f64,
    /// Defaults to `release_window / releases`, which keeps power-of-two
    /// release grids nested.
    release_step: Option<f64>,
    lambda0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraints {
    peak: f64,
    ratio: Option<f64>,
    mean: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: SweepVariable,
    values: Option<Vec<f64>>,
    /// Diffusion coefficients for a `c` sweep driven by geometry.
    diffusion: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    x_grid_size: Option<usize>,
    ba_tol: Option<f64>,
    ba_max_iter: Option<usize>,
    y_tail_mass: Option<f64>,
    alphabet_cap: Option<f64>,
    taylor_order: Option<u32>,
    root_tol: Option<f64>,
    eta: Option<f64>,
    lb3_variant: Option<Lb3Variant>,
    tb_input: Option<TimingInput>,
    tb_concentration: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
    name: Option<String>,
    formats: Option<Vec<OutputFormat>>,
}

/// Numerical settings shared by every sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub x_grid_size: usize,
    pub ba: BaOptions,
    pub truncation: Truncation,
    pub bounds: BoundConfig,
    pub tb_input: TimingInput,
    /// Fixed concentration of the timing-only scheme; `None` uses `E_m`.
    pub tb_concentration: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            x_grid_size: 32,
            ba: BaOptions {
                tol: 1e-4,
                ..BaOptions::default()
            },
            truncation: Truncation::default(),
            bounds: BoundConfig::default(),
            tb_input: TimingInput::Uniform,
            tb_concentration: None,
        }
    }
}

/// One fully resolved sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub params: ChannelParams,
    pub constraints: ConstraintSet,
    /// Diffusion coefficient when the Lévy scale came from geometry.
    pub diffusion: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub title: String,
    /// Free text carried into the plot, e.g. declared parameter substitutions.
    pub note: Option<String>,
    pub methods: Vec<Method>,
    pub variable: SweepVariable,
    pub points: Vec<SweepPoint>,
    pub numerics: Numerics,
    pub output_dir: String,
    pub formats: Vec<OutputFormat>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "sweep".into());
        Self::from_toml_str(&text, &stem)
    }

    /// Parses and validates a config. `default_name` names the output files
    /// unless `[output] name` is given.
    pub fn from_toml_str(text: &str, default_name: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        raw.resolve(default_name)
    }
}

impl RawConfig {
    fn resolve(self, default_name: &str) -> Result<ExperimentConfig> {
        if self.methods.is_empty() {
            return Err(cfg_err("methods must not be empty"));
        }
        for (k, m) in self.methods.iter().enumerate() {
            if self.methods[..k].contains(m) {
                return Err(cfg_err(format!("method {} listed twice", m.name())));
            }
        }
        let numerics = self.numerics.resolve()?;
        let variable = self.sweep.variable;
        let ch = &self.channel;

        let (values, diffusions): (Vec<f64>, Vec<Option<f64>>) =
            match (&self.sweep.values, &self.sweep.diffusion) {
                (Some(v), None) => (v.clone(), vec![None; v.len()]),
                (None, Some(ds)) => {
                    if variable != SweepVariable::LevyScale {
                        return Err(cfg_err("sweep.diffusion is only valid for a c sweep"));
                    }
                    let d = ch
                        .distance
                        .ok_or_else(|| cfg_err("a diffusion sweep needs channel.distance"))?;
                    let mut cs = Vec::with_capacity(ds.len());
                    for &dc in ds {
                        let geom =
                            ChannelGeometry::new(d, dc).map_err(|e| cfg_err(e.to_string()))?;
                        cs.push(geom.levy_scale(ch.relation));
                    }
                    (cs, ds.iter().map(|&d| Some(d)).collect())
                }
                (Some(_), Some(_)) => {
                    return Err(cfg_err(
                        "give either sweep.values or sweep.diffusion, not both",
                    ))
                }
                (None, None) => return Err(cfg_err("sweep needs values or diffusion")),
            };
        if values.is_empty() {
            return Err(cfg_err("sweep grid is empty"));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(cfg_err("sweep grid must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(cfg_err("sweep values must be positive and finite"));
        }
        if variable.is_count() && values.iter().any(|v| v.fract() != 0.0) {
            return Err(cfg_err(format!("{} takes integer values", variable.name())));
        }

        let base_c = match (ch.c, ch.distance, ch.diffusion) {
            (Some(c), None, None) => Some(c),
            (None, Some(d), Some(dc)) => Some(
                ChannelGeometry::new(d, dc)
                    .map_err(|e| cfg_err(e.to_string()))?
                    .levy_scale(ch.relation),
            ),
            (None, _, None) if variable == SweepVariable::LevyScale => None,
            (None, Some(_), None) => {
                return Err(cfg_err("channel.distance needs channel.diffusion"))
            }
            _ => {
                return Err(cfg_err(
                    "give either channel.c or channel.distance with channel.diffusion",
                ))
            }
        };
        let base_diffusion = ch.diffusion;

        let mut points = Vec::with_capacity(values.len());
        for (&value, &diffusion) in values.iter().zip(&diffusions) {
            let mut c = base_c.unwrap_or(value);
            let mut n = ch.intervals;
            let mut m = ch.releases;
            let mut peak = self.constraints.peak;
            let mut diff_used = base_diffusion;
            match variable {
                SweepVariable::Peak => peak = value,
                SweepVariable::LevyScale => {
                    c = value;
                    diff_used = diffusion;
                }
                SweepVariable::Releases => m = value as usize,
                SweepVariable::Intervals => n = value as usize,
            }
            let step = ch.release_step.unwrap_or(ch.release_window / m as f64);
            let params = ChannelParams::new(
                c,
                ch.symbol_period,
                n,
                m,
                step,
                ch.release_window,
                ch.lambda0,
            )
            .map_err(|e| cfg_err(format!("{} = {value}: {e}", variable.name())))?;
            let constraints = match (self.constraints.ratio, self.constraints.mean) {
                (Some(r), None) => ConstraintSet::from_ratio(peak, r),
                (None, Some(mean)) => ConstraintSet::new(mean, peak),
                _ => {
                    return Err(cfg_err(
                        "give exactly one of constraints.ratio and constraints.mean",
                    ))
                }
            }
            .map_err(|e| cfg_err(format!("{} = {value}: {e}", variable.name())))?;
            if let Some(x) = numerics.tb_concentration {
                if self.methods.contains(&Method::Tb) && !(x > 0.0 && x <= constraints.peak) {
                    return Err(cfg_err(format!("tb_concentration {x} is outside (0, M]")));
                }
            }
            points.push(SweepPoint {
                value,
                params,
                constraints,
                diffusion: diff_used,
            });
        }
        if self.methods.contains(&Method::Ub) && !(ch.lambda0 > 0.0) {
            return Err(cfg_err("the upper bound needs lambda0 > 0"));
        }

        let name = self.output.name.unwrap_or_else(|| default_name.to_string());
        Ok(ExperimentConfig {
            title: self.title.unwrap_or_else(|| name.clone()),
            name,
            note: self.note,
            methods: self.methods,
            variable,
            points,
            numerics,
            output_dir: self.output.dir.unwrap_or_else(|| ".".into()),
            formats: self
                .output
                .formats
                .unwrap_or_else(|| vec![OutputFormat::Csv, OutputFormat::Svg]),
        })
    }
}

impl RawNumerics {
    fn resolve(self) -> Result<Numerics> {
        let d = Numerics::default();
        let tail = self.y_tail_mass.unwrap_or(d.truncation.y_tail_mass);
        let cap = self.alphabet_cap.unwrap_or(DEFAULT_ALPHABET_CAP as f64);
        let n = Numerics {
            x_grid_size: self.x_grid_size.unwrap_or(d.x_grid_size),
            ba: BaOptions {
                tol: self.ba_tol.unwrap_or(d.ba.tol),
                max_iter: self.ba_max_iter.unwrap_or(d.ba.max_iter),
            },
            truncation: Truncation {
                y_tail_mass: tail,
                alphabet_cap: cap as u64,
            },
            bounds: BoundConfig {
                eta: self.eta,
                taylor_order: self.taylor_order.unwrap_or(d.bounds.taylor_order),
                root_tol: self.root_tol.unwrap_or(d.bounds.root_tol),
                y_tail_mass: tail,
                lb3_variant: self.lb3_variant.unwrap_or_default(),
            },
            tb_input: self.tb_input.unwrap_or_default(),
            tb_concentration: self.tb_concentration,
        };
        if n.x_grid_size < 2 {
            return Err(cfg_err("x_grid_size must be at least 2"));
        }
        if !(n.ba.tol > 0.0) || n.ba.max_iter == 0 {
            return Err(cfg_err("ba_tol must be positive and ba_max_iter nonzero"));
        }
        if !(tail > 0.0 && tail < 1.0) {
            return Err(cfg_err("y_tail_mass must be in (0, 1)"));
        }
        if !(cap >= 1.0) {
            return Err(cfg_err("alphabet_cap must be at least 1"));
        }
        n.bounds.validate().map_err(|e| cfg_err(e.to_string()))?;
        Ok(n)
    }
}
