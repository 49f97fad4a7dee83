use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use opspread_core::experiment::{run_experiment_with, run_lemma_sweep, LemmaSweep, RunOptions};
use opspread_core::verify::run_verification;
use opspread_core::{emit, ExperimentConfig, PopulationConvention};

#[derive(Parser)]
#[command(
    name = "opspread",
    version,
    about = "Operator growth in the open SYK model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Modulus,
    RealPart,
}

#[derive(Subcommand)]
enum Command {
    /// Run a disorder ensemble and write the result tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the output directory in the config file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Krylov population convention.
        #[arg(long, value_enum, default_value = "modulus")]
        convention: Convention,
    },
    /// Run the oracle and invariant checks at N = 8.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check Taylor order and entropy minimality of the Krylov basis.
    Lemma {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        realizations: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_file(path).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            seed,
            workers,
            out,
            convention,
        } => {
            let mut config = load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(out) = out {
                config.outputs = out;
            }
            let options = RunOptions {
                workers,
                convention: match convention {
                    Convention::Modulus => PopulationConvention::Modulus,
                    Convention::RealPart => PopulationConvention::RealPart,
                },
                ..Default::default()
            };
            info!(
                "N = {}, {} realizations x {} mu values",
                config.n_fermions,
                config.n_realizations,
                config.mu_values.len()
            );
            let bundle = run_experiment_with(&config, &options)?;
            for e in &bundle.exclusions {
                warn!(
                    "excluded mu = {} realization {}: {}",
                    e.mu, e.realization, e.reason
                );
            }
            let files = emit(&bundle, &config.outputs)?;
            for s in &bundle.summaries {
                println!(
                    "mu/J = {:<6} K(end) = {:>8.3}  M_K = {:>7.2}  ok = {}  excluded = {}",
                    s.mu,
                    s.k.mean.last().copied().unwrap_or(f64::NAN),
                    s.mk_mean,
                    s.n_success,
                    s.n_excluded
                );
            }
            println!(
                "wrote {} files to {}",
                files.len(),
                config.outputs.display()
            );
            Ok(true)
        }
        Command::Verify { seed } => {
            let checks = run_verification(seed)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                println!("{c}");
            }
            println!("{} checks, {failed} failed", checks.len());
            Ok(failed == 0)
        }
        Command::Lemma {
            config,
            realizations,
            trials,
        } => {
            let config = load(&config)?;
            let sweep = LemmaSweep {
                realizations,
                n_trials: trials,
                ..Default::default()
            };
            let rows = run_lemma_sweep(&config, &sweep)?;
            println!("mu,realization,m,bases,slopes_ok,minimal,minimal_modulus,worst_slope_dev,worst_gap,worst_gap_modulus");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{},{},{:e},{:e},{:e}",
                    r.mu,
                    r.realization,
                    r.m,
                    r.n_bases,
                    r.slopes_ok,
                    r.minimal,
                    r.minimal_modulus,
                    r.worst_slope_deviation,
                    r.worst_gap,
                    r.worst_gap_modulus
                );
            }
            Ok(rows.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
