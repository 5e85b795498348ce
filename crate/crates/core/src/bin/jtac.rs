//! `jtac run <config> [--out DIR] [--nats]` and `jtac table1`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jtac::sweep::{
    emit_csv, emit_svg_plot, run_sweep, table1_report, ExperimentConfig, OutputFormat, PlotStyle,
    RateUnit,
};
use jtac::Error;

#[derive(Parser)]
#[command(
    name = "jtac",
    version,
    about = "Capacity bounds and numerical capacity of JTAC molecular channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config and write CSV/SVG output.
    Run {
        config: PathBuf,
        /// Output directory; overrides `[output] dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write rates in nats instead of bits.
        #[arg(long)]
        nats: bool,
    },
    /// Print the (c, D) geometry table and the scale-relation note.
    Table1,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn run(config: &Path, out: Option<PathBuf>, nats: bool) -> Result<bool, (u8, Error)> {
    let cfg = ExperimentConfig::from_path(config).map_err(|e| (EXIT_CONFIG, e))?;
    let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    std::fs::create_dir_all(&dir).map_err(|e| {
        (
            EXIT_CONFIG,
            Error::Io {
                path: dir.display().to_string(),
                message: e.to_string(),
            },
        )
    })?;
    let unit = if nats { RateUnit::Nats } else { RateUnit::Bits };
    if let Some(note) = &cfg.note {
        eprintln!("{}: {note}", cfg.name);
    }
    let table = run_sweep(&cfg);
    for row in table.rows.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "{} = {}: {}",
            cfg.variable.name(),
            row.sweep_value,
            row.status
        );
    }
    for fmt in &cfg.formats {
        match fmt {
            OutputFormat::Csv => {
                let path = dir.join(format!("{}.csv", cfg.name));
                emit_csv(&table, unit, &path).map_err(|e| (EXIT_NUMERIC, e))?;
                println!("wrote {}", path.display());
            }
            OutputFormat::Svg if table.rows.len() >= 2 => {
                let path = dir.join(format!("{}.svg", cfg.name));
                let mut style = PlotStyle::new(cfg.title.clone(), unit);
                style.subtitle = cfg.note.clone();
                emit_svg_plot(&table, &style, &path).map_err(|e| (EXIT_NUMERIC, e))?;
                println!("wrote {}", path.display());
            }
            OutputFormat::Svg => eprintln!("skipping plot: a single sweep point"),
        }
    }
    Ok(table.rows.iter().any(|r| r.has_numerical_error()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Table1 => {
            print!("{}", table1_report());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, nats } => match run(&config, out, nats) {
            Ok(false) => ExitCode::SUCCESS,
            Ok(true) => {
                eprintln!("some points failed numerically; see the status column");
                ExitCode::from(EXIT_NUMERIC)
            }
            Err((code, e)) => {
                eprintln!("error: {e}");
                ExitCode::from(code)
            }
        },
    }
}
