//! Command-line front end: parameter sweeps written as CSV or JSON.

pub mod commands;
pub mod error;
pub mod grid;
pub mod table;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use parasqueeze_core::dynamics::PiecewiseLinear;
use parasqueeze_core::schedule::{Regime, SwitchSchedule};
use serde_json::{json, Value};

use crate::commands::{EntropyConfig, OccupationsConfig, ResonanceConfig};
use crate::error::CliError;
use crate::grid::{parse_levels, parse_range};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Ratchet,
    Seesaw,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Ratchet => Regime::Ratchet,
            RegimeArg::Seesaw => Regime::Seesaw,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "parasqueeze", version, about = "Squeezing and heat cost of switched oscillators")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Numerical tolerance. Rows whose error estimate exceeds it are flagged.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "PARASQUEEZE_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level occupations of the squeezed thermal state against equilibrium.
    Occupations {
        /// Ratios ħω/k_BT, as a list or range.
        #[arg(long = "omega-over-t", default_value = "0.2,0.4")]
        omega_over_t: String,
        /// Squeezing offsets ε = s − 1.
        #[arg(long = "epsilon-range", visible_alias = "epsilon", default_value = "0:0.5:0.01")]
        epsilon: String,
        /// Levels as `8,9,10` or `3..7`. Defaults to a window around the crossing level.
        #[arg(long)]
        levels: Option<String>,
    },
    /// Compose a switching schedule step by step.
    Evolve {
        /// Schedule file (JSON).
        #[arg(long)]
        schedule: PathBuf,
        /// Write the run summary here. Without it the summary goes to stderr in CSV mode.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Entropy change and heat cost of a squeezed thermal state.
    Entropy {
        #[arg(long = "omega-over-t", default_value = "0.2,0.4")]
        omega_over_t: String,
        #[arg(long = "epsilon-range", visible_alias = "epsilon", default_value = "0:0.1:0.005")]
        epsilon: String,
    },
    /// Runaway map over phase angle and jump ratio.
    ResonanceScan {
        #[arg(long = "theta-range", visible_alias = "theta", default_value = "0.05:1.5:x50")]
        theta: String,
        #[arg(long = "s-range", visible_alias = "s", default_value = "1:5:x50")]
        s: String,
        #[arg(long, value_enum, default_value_t = RegimeArg::Ratchet)]
        regime: RegimeArg,
    },
    /// Flow map of a smooth frequency profile.
    Flow {
        /// Piecewise-linear profile file (JSON knots `[[t, ω], ...]`).
        #[arg(long)]
        profile: PathBuf,
        /// Largest integrator step. Defaults to a fraction of the shortest period.
        #[arg(long = "dt-max")]
        dt_max: Option<f64>,
    },
}

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: Table,
    pub summary: Option<Value>,
}

impl Output {
    /// Main document in the chosen format.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Json => {
                let doc = match &self.summary {
                    Some(s) => json!({ "summary": s, "rows": self.table.to_json_value() }),
                    None => self.table.to_json_value(),
                };
                let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                text.push('\n');
                text
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Config(format!("--tol must be > 0, got {}", cli.tol)));
    }
    let plain = |table| Ok(Output { table, summary: None });
    match &cli.command {
        Command::Occupations {
            omega_over_t,
            epsilon,
            levels,
        } => plain(commands::occupations(&OccupationsConfig {
            omega_over_t: parse_range(omega_over_t, "omega-over-t")?,
            epsilon: parse_range(epsilon, "epsilon")?,
            levels: levels.as_deref().map(parse_levels).transpose()?,
            tol: cli.tol,
        })?),
        Command::Evolve { schedule, .. } => {
            let sched = SwitchSchedule::from_json(&read_file(schedule)?)?;
            let (table, summary) = commands::evolve(&sched)?;
            Ok(Output {
                table,
                summary: Some(summary),
            })
        }
        Command::Entropy {
            omega_over_t,
            epsilon,
        } => plain(commands::entropy(&EntropyConfig {
            omega_over_t: parse_range(omega_over_t, "omega-over-t")?,
            epsilon: parse_range(epsilon, "epsilon")?,
            tol: cli.tol,
        })?),
        Command::ResonanceScan { theta, s, regime } => {
            plain(commands::resonance_scan(&ResonanceConfig {
                theta: parse_range(theta, "theta")?,
                s: parse_range(s, "s")?,
                regime: (*regime).into(),
            })?)
        }
        Command::Flow { profile, dt_max } => {
            let prof = PiecewiseLinear::from_json(&read_file(profile)?)?;
            if let Some(dt) = dt_max {
                if !(*dt > 0.0) {
                    return Err(CliError::Config(format!("--dt-max must be > 0, got {dt}")));
                }
            }
            plain(commands::flow(&prof, *dt_max, cli.tol)?)
        }
    }
}

/// Writes the rendered output and, for `evolve`, the summary.
pub fn emit(cli: &Cli, output: &Output) -> Result<(), CliError> {
    let text = output.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))?,
        None => print!("{text}"),
    }
    if let (Command::Evolve { summary: target, .. }, Some(summary)) = (&cli.command, &output.summary) {
        let mut text = serde_json::to_string_pretty(summary).expect("JSON values serialize");
        text.push('\n');
        match target {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))?,
            None if cli.format == Format::Csv => eprint!("{text}"),
            None => {}
        }
    }
    Ok(())
}
