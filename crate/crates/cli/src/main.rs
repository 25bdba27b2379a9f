//! Command-line front end for the calibration-attack and key-rate models.
//!
//! All data goes to `--out` (or stdout); diagnostics go to stderr; the
//! exit code is zero exactly when every operation succeeded. Identical
//! config and seed produce byte-identical output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use bemsim_cli::commands;
use bemsim_cli::config::{self, resolve_seed, OutputFormat};
use bemsim_cli::table::Report;

#[derive(Parser)]
#[command(
    name = "bemsim",
    version,
    about = "Calibration-spoofing, efficiency-mismatch and key-rate analysis for gated-detector BB84 receivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config file for the subcommand
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for stochastic commands (overrides the config file)
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Output file; stdout when omitted
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format (overrides the config file; default csv)
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Run attacked calibrations and tally the mismatch outcomes
    Calibrate,
    /// Sweep the attack analytics over mismatch-ratio grids
    FsaSweep,
    /// Sweep the secure-key-rate formula and its tagged-fraction cross-check
    Keyrate,
    /// Run one Monte-Carlo key-distribution session
    Session,
    /// Simulate the post-calibration detector self-test
    SelfTest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config_path = cli.config.as_deref().context("--config PATH is required")?;

    let (report, out, format) = match &cli.command {
        Command::Calibrate => {
            let config: config::CalibrateConfig = config::load(config_path)?;
            let seed = resolve_seed(cli.seed, config.seed)?;
            let report = commands::calibrate::run(&config, seed)?;
            (report, config.out, config.format)
        }
        Command::FsaSweep => {
            let config: config::FsaSweepConfig = config::load(config_path)?;
            let report = commands::fsa_sweep::run(&config)?;
            (report, config.out, config.format)
        }
        Command::Keyrate => {
            let config: config::KeyrateConfig = config::load(config_path)?;
            let report = commands::keyrate::run(&config)?;
            (report, config.out, config.format)
        }
        Command::Session => {
            let config: config::SessionCmdConfig = config::load(config_path)?;
            let seed = resolve_seed(cli.seed, config.seed)?;
            let report = commands::session::run(&config, seed)?;
            (report, config.out, config.format)
        }
        Command::SelfTest => {
            let config: config::SelfTestCmdConfig = config::load(config_path)?;
            let seed = resolve_seed(cli.seed, config.seed)?;
            let report = commands::self_test::run(&config, seed)?;
            (report, config.out, config.format)
        }
    };

    let out = cli.out.clone().or(out);
    let format = cli.format.or(format).unwrap_or(OutputFormat::Csv);
    emit(&report, out.as_deref(), format)
}

fn emit(report: &Report, out: Option<&std::path::Path>, format: OutputFormat) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to stdout")?,
    }
    Ok(())
}
