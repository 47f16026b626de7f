//! `hapsim`: Monte Carlo campaigns for an aerial reflective-surface
//! backhaul between a ground station and scattered gateways.
//!
//! Subcommands:
//! - `simulate` runs one campaign and writes records, CDF series and a
//!   text summary;
//! - `sweep` tabulates median rate and per-dB slope over the transmit
//!   power grid;
//! - `feasibility` prints the payload sizing report without Monte Carlo;
//! - `optimize-grouping` evaluates the configured schemes as grouping
//!   candidates under common random numbers and picks the best one.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use hapsim_core::engine::{
    run_campaign, select_grouping, sweep_tx_power, GroupingObjective, SchemePowerReport,
};
use hapsim_core::metrics::{feasibility_report, ris_power_consumption, Direction};

#[derive(Parser)]
#[command(
    name = "hapsim",
    version,
    about = "System-level simulator for a stratospheric reflective-surface backhaul"
)]
struct Cli {
    /// Config file (flat key = value with [section] headers); defaults
    /// apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides master_seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides num_drops from the config.
    #[arg(long, global = true)]
    drops: Option<usize>,
    /// Directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full campaign and write records.csv, CDF series and summary.txt.
    Simulate,
    /// Median rate and per-dB slope across the transmit-power grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = DirectionArg::Downlink)]
        direction: DirectionArg,
    },
    /// Payload sizing report only; no Monte Carlo.
    Feasibility,
    /// Evaluate the configured schemes as grouping candidates and pick one.
    OptimizeGrouping {
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxSumRate)]
        objective: ObjectiveArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Downlink,
    Uplink,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Downlink => Direction::Downlink,
            DirectionArg::Uplink => Direction::Uplink,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinPower,
    MaxSumRate,
    MaxEnergyEfficiency,
}

impl From<ObjectiveArg> for GroupingObjective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::MinPower => GroupingObjective::MinPower,
            ObjectiveArg::MaxSumRate => GroupingObjective::MaxSumRate,
            ObjectiveArg::MaxEnergyEfficiency => GroupingObjective::MaxEnergyEfficiency,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Output(#[from] output::OutputError),
    #[error(transparent)]
    Model(#[from] hapsim_core::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Prints to stdout, exiting quietly when the consumer closed the pipe
/// early (`hapsim ... | head` must not panic).
fn say(text: impl AsRef<str>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let failed = out
        .write_all(text.as_ref().as_bytes())
        .and_then(|()| out.write_all(b"\n"))
        .is_err();
    if failed {
        std::process::exit(0);
    }
}

/// Like `say`, but without the trailing newline (for preformatted blocks).
fn say_raw(text: &str) {
    use std::io::Write;
    if std::io::stdout().lock().write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut spec = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => config::default_config()?,
    };
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    if let Some(drops) = cli.drops {
        spec.num_drops = drops;
    }
    spec.validate()?;

    match cli.command {
        Command::Simulate => {
            let result = run_campaign(&spec)?;
            let written = output::emit_results(&spec, &result, &cli.out)?;
            say(format!(
                "{} records, {} CDF series, seed {}",
                result.records.len(),
                result.series.len(),
                spec.master_seed
            ));
            for path in written {
                say(format!("wrote {}", path.display()));
            }
        }
        Command::Sweep { direction } => {
            let table = sweep_tx_power(&spec, direction.into())?;
            say_raw(&output::sweep_text(&table));
            let name = format!("sweep_{}.csv", table.direction.label());
            let path = output::emit_file(&cli.out, &name, &output::sweep_csv(&table))?;
            say(format!("wrote {}", path.display()));
        }
        Command::Feasibility => {
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for arch in &spec.schemes {
                let ris_power_w = ris_power_consumption(arch, &spec.power)?;
                rows.push(SchemePowerReport {
                    label: arch.label(),
                    amplifier_count: arch.amplifier_count(),
                    ris_power_w,
                });
                reports.push((
                    arch.label(),
                    feasibility_report(
                        arch,
                        &spec.power,
                        &spec.feasibility,
                        spec.channel.frequency_ghz,
                    )?,
                ));
            }
            say_raw(&output::power_block(&rows));
            say("");
            say_raw(&output::feasibility_block(&spec, &reports));
        }
        Command::OptimizeGrouping { objective } => {
            let candidates = spec.schemes.clone();
            let selection = select_grouping(&spec, objective.into(), &candidates)?;
            say_raw(&output::grouping_text(&selection));
            let path =
                output::emit_file(&cli.out, "grouping.csv", &output::grouping_csv(&selection))?;
            say(format!("wrote {}", path.display()));
        }
    }
    Ok(())
}
