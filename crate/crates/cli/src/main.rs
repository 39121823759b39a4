//! `picast` — prediction-interval forecasting experiments from the shell.
//!
//! Subcommands: `synth` writes a seeded synthetic series, `run` executes the
//! full three-model protocol and writes report/trace files, `eval` re-scores
//! any bounds CSV. Exit codes: 0 success, 1 config error, 2 data error,
//! 3 numeric failure.

mod config;
mod error;
mod experiment;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use picast::metrics::{evaluate, Evaluation, PiConfig};

use crate::config::{DataSource, ExperimentConfig};
use crate::error::CliError;
use crate::experiment::{obtain_series, run_experiment};
use crate::report::read_bounds_csv;

#[derive(Parser)]
#[command(name = "picast", version, about = "Prediction-interval forecasting for short-term hourly series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// JSON experiment config; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the config's global seed.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured synthetic series and write it as CSV.
    Synth {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Train and evaluate all models at every configured confidence level.
    Run {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Re-score a bounds CSV (`index,lower,upper,actual[,covered]`).
    Eval {
        /// Bounds file to score.
        bounds: PathBuf,
        /// Nominal confidence level in (0, 1); must have a sharpness-weight
        /// entry in the config.
        #[arg(long, value_name = "FRACTION")]
        pinc: f64,
        /// JSON experiment config; built-in defaults when omitted.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut config = match path {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_synth(opts: &CommonOpts) -> Result<(), CliError> {
    let config = load_config(&opts.config, opts.seed)?;
    if !matches!(config.data, DataSource::Synth { .. }) {
        return Err(CliError::config(
            "synth needs a synthetic data source; this config reads a CSV",
        ));
    }
    let series = obtain_series(&config)?;
    std::fs::create_dir_all(&opts.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", opts.out.display())))?;
    let path = opts.out.join("synth.csv");
    picast::series::write_csv(&path, &series).map_err(|e| CliError::stage("writing", e))?;
    println!("{} rows -> {}", series.len(), path.display());
    Ok(())
}

fn cmd_run(opts: &CommonOpts) -> Result<(), CliError> {
    let config = load_config(&opts.config, opts.seed)?;
    let output = run_experiment(&config, &opts.out)?;
    println!(
        "{} report rows across {} levels -> {}",
        output.rows.len(),
        config.pinc_levels.len(),
        opts.out.join("report.tsv").display()
    );
    for file in &output.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}

fn cmd_eval(bounds: &PathBuf, pinc: f64, config_path: &Option<PathBuf>) -> Result<(), CliError> {
    let config = load_config(config_path, None)?;
    let weights = config.weights_for(pinc).ok_or_else(|| {
        CliError::config(format!(
            "no sharpness_weights entry for pinc {pinc}; add one to the config"
        ))
    })?;
    let pi = PiConfig::from_pinc(pinc).map_err(CliError::from_config_stage)?;
    let forecast = read_bounds_csv(bounds, pi)?;
    let evaluation = evaluate(&forecast, &weights, &config.objective_weights)
        .map_err(|e| CliError::stage("evaluation", e))?;
    let model = bounds
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bounds".into());
    println!("{}", Evaluation::TSV_HEADER);
    println!("{}", evaluation.tsv_row(&model, pinc));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth { opts } => cmd_synth(opts),
        Command::Run { opts } => cmd_run(opts),
        Command::Eval {
            bounds,
            pinc,
            config,
        } => cmd_eval(bounds, *pinc, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
