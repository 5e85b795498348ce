use std::path::Path;

use super::{ColumnKind, RateUnit, SweepTable};
use crate::error::{Error, Result};

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders the table as CSV text: header, then one LF-terminated line per
/// row. Reals carry 17 significant digits; failed cells are empty.
pub fn render_csv(table: &SweepTable, unit: RateUnit) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let bad = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    };
    let mut header = vec!["sweep_var".to_string(), "sweep_value".to_string()];
    header.extend(table.columns.iter().map(|c| c.name.clone()));
    header.push("status".into());
    w.write_record(&header).map_err(bad)?;
    for row in &table.rows {
        let mut rec = vec![table.variable.name().to_string(), real(row.sweep_value)];
        for (cell, c) in row.cells.iter().zip(&table.columns) {
            rec.push(match (cell, c.kind) {
                (None, _) => String::new(),
                (Some(v), ColumnKind::Rate) => real(unit.convert(*v)),
                (Some(v), ColumnKind::Real) => real(*v),
                (Some(v), ColumnKind::Count) => format!("{}", *v as u64),
            });
        }
        rec.push(row.status.clone());
        w.write_record(&rec).map_err(bad)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

pub fn emit_csv(table: &SweepTable, unit: RateUnit, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    let text = render_csv(table, unit)?;
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}
