use std::fmt::Write as _;
use std::path::Path;

use super::{RateUnit, SweepTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    /// Small print under the title.
    pub subtitle: Option<String>,
    pub width: f64,
    pub height: f64,
    pub unit: RateUnit,
}

impl PlotStyle {
    pub fn new(title: impl Into<String>, unit: RateUnit) -> Self {
        Self {
            title: title.into(),
            subtitle: None,
            width: 720.0,
            height: 480.0,
            unit,
        }
    }
}

const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 56.0;
const BOTTOM: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick step from {1, 2, 5}·10^k giving roughly `target` ticks.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, 5.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let step = tick_step(hi - lo, 5.0);
    ((lo / step).floor() * step, (hi / step).ceil() * step)
}

fn label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Line plot of every method curve against the sweep value. A failed point
/// breaks the curve; nothing is interpolated across it.
pub fn render_svg(table: &SweepTable, style: &PlotStyle) -> Result<String> {
    if table.rows.len() < 2 {
        return Err(Error::InvalidParameter(
            "a plot needs at least two sweep points".into(),
        ));
    }
    let curves: Vec<(usize, &'static str)> = table
        .columns
        .iter()
        .enumerate()
        .filter_map(|(k, c)| c.curve.map(|m| (k, m.label())))
        .collect();
    let xs: Vec<f64> = table.rows.iter().map(|r| r.sweep_value).collect();
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let ys = curves
        .iter()
        .flat_map(|&(k, _)| table.rows.iter().filter_map(move |r| r.cells[k]))
        .map(|v| style.unit.convert(v));
    let (y0, y1) = padded_range(ys);

    let (w, h) = (style.width, style.height);
    let (pw, ph) = (w - LEFT - RIGHT, h - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="22" font-size="15">{}</text>"#,
        escape(&style.title)
    );
    if let Some(sub) = &style.subtitle {
        let _ = writeln!(
            s,
            r##"<text x="{LEFT}" y="40" font-size="10" fill="#555">{}</text>"##,
            escape(sub)
        );
    }

    // axes and grid
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        h - 14.0,
        escape(table.variable.axis_label())
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        style.unit.axis_label()
    );

    for (n, &(k, name)) in curves.iter().enumerate() {
        let color = PALETTE[n % PALETTE.len()];
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, s: &mut String| {
            if !run.is_empty() {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    run.join(" ")
                );
                run.clear();
            }
        };
        for r in &table.rows {
            match r.cells[k] {
                Some(v) => run.push(format!(
                    "{:.2},{:.2}",
                    sx(r.sweep_value),
                    sy(style.unit.convert(v))
                )),
                None => flush(&mut run, &mut s),
            }
        }
        flush(&mut run, &mut s);

        let ly = TOP + 10.0 + 18.0 * n as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_plot(table: &SweepTable, style: &PlotStyle, path: &Path) -> Result<()> {
    let text = render_svg(table, style)?;
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
