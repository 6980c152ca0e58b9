//! `opmod` experiment runner: subcommands, JSON configs, witness files and
//! CSV reports on top of `opmod-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{
    DoiCheckParams, Experiment, ExperimentConfig, FourierCheckParams, HolderParams, LatticeBoundParams, MccCheckParams,
    MultnormParams, OmegaParams, SearchExtremalParams,
};
use error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "OPMOD_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "opmod", version, about = "Operator and commutator moduli experiments")]
pub struct Cli {
    /// Artifact directory; falls back to the config's `out_dir`, then `OPMOD_OUT_DIR`, then `.`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower and upper bounds on a Schur multiplier norm.
    Multnorm(MultnormParams),
    /// Numerical check of the Fourier transform identities.
    FourierCheck(FourierCheckParams),
    /// Multiplier bounds for divided differences on a square lattice.
    LatticeBound(LatticeBoundParams),
    /// Tabulate ω, ω* and ω** on a grid.
    Omega(OmegaParams),
    /// Compare the double operator integral with the direct quasicommutator.
    DoiCheck(DoiCheckParams),
    /// Search for extremal witnesses of a modulus of continuity.
    SearchExtremal(SearchExtremalParams),
    /// Hölder ratio search or the quasicommutator experiment.
    Holder(HolderParams),
    /// Sandwich and swap checks relating the moduli.
    MccCheck(MccCheckParams),
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// What a finished run wrote.
#[derive(Debug)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub failures: Vec<String>,
}

fn resolve(cli: &Cli) -> CliResult<ExperimentConfig> {
    let experiment = match &cli.command {
        Command::Multnorm(p) => Experiment::Multnorm(p.clone()),
        Command::FourierCheck(p) => Experiment::FourierCheck(p.clone()),
        Command::LatticeBound(p) => Experiment::LatticeBound(p.clone()),
        Command::Omega(p) => Experiment::Omega(p.clone()),
        Command::DoiCheck(p) => Experiment::DoiCheck(p.clone()),
        Command::SearchExtremal(p) => Experiment::SearchExtremal(p.clone()),
        Command::Holder(p) => Experiment::Holder(p.clone()),
        Command::MccCheck(p) => Experiment::MccCheck(p.clone()),
        Command::Run { config } => {
            let bytes = std::fs::read(config).map_err(|source| CliError::Io { path: config.clone(), source })?;
            let mut c = ExperimentConfig::from_json(&bytes)?;
            if cli.out_dir.is_some() {
                c.out_dir = cli.out_dir.clone();
            }
            if cli.workers.is_some() {
                c.workers = cli.workers;
            }
            return Ok(c);
        }
    };
    let mut c = ExperimentConfig::new(experiment);
    c.out_dir = cli.out_dir.clone();
    c.workers = cli.workers;
    Ok(c)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Runs a resolved configuration. Nothing is written unless the computation
/// completes; violated invariants still produce artifacts and are reported in
/// [`Outcome::failures`].
pub fn run_config(cfg: &ExperimentConfig, env_out_dir: Option<PathBuf>) -> CliResult<Outcome> {
    if cfg.workers == Some(0) {
        return Err(CliError::config("workers must be positive"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("cannot start worker pool: {e}")))?;
    let artifacts = pool.install(|| commands::execute(&cfg.experiment))?;
    let out_dir = cfg.out_dir.clone().or(env_out_dir).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|source| CliError::Io { path: out_dir.clone(), source })?;
    let stem = cfg.experiment.stem();
    let mut written = vec![write(&out_dir, &format!("{stem}.config.json"), &cfg.to_json()?)?];
    for (name, bytes) in &artifacts.files {
        written.push(write(&out_dir, name, bytes)?);
    }
    Ok(Outcome { out_dir, written, summary: artifacts.summary, failures: artifacts.failures })
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let cfg = resolve(cli)?;
    run_config(&cfg, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}
