//! Experiment configurations. Every subcommand's flags deserialize from the
//! same structs, so a JSON config and the equivalent flags give the same run.

use std::path::PathBuf;

use clap::{Args, Parser};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
struct DefaultsOf<T: Args> {
    #[command(flatten)]
    inner: T,
}

/// Flag defaults, reused as serde defaults.
pub fn defaults<T: Args>() -> T {
    DefaultsOf::<T>::parse_from(["opmod"]).inner
}

macro_rules! serde_default_from_flags {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                defaults::<$t>()
            }
        }
    )*};
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultnormParams {
    /// Matrix file in the JSON interchange format.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Restarts of the lower-bound search.
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    /// Reweighting iterations of the upper-bound factorization.
    #[arg(long, default_value_t = 300)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierCheckParams {
    /// Formula ids: chi_disc, psi, psi_sq, gaussian.
    #[arg(long, value_delimiter = ',', default_values_t = ["chi_disc".to_string(), "psi".to_string(), "psi_sq".to_string()])]
    pub formula: Vec<String>,
    /// Half-width W of the frequency square.
    #[arg(long, default_value_t = 64.0)]
    pub half_width: f64,
    /// Grid size N (power of two).
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub supersample: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeBoundParams {
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Disc radii, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [8.0, 16.0, 32.0, 64.0])]
    pub r: Vec<f64>,
    #[arg(long, default_value = "conj")]
    pub f: String,
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaParams {
    /// `power:a`, `bounded:a,cap`, `linear` or `table:PATH` (JSON with arrays t and w).
    #[arg(long, default_value = "power:0.5")]
    pub modulus: String,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-2, 1e-1, 1.0])]
    pub delta_grid: Vec<f64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoiCheckParams {
    /// Dimension cap; each instance draws both sizes in 1..=dim.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Function ids, used in turn; repeat the flag for several.
    #[arg(long, default_values_t = ["z".to_string(), "conj".to_string(), "pow:2".to_string(), "hn:1".to_string()])]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchExtremalParams {
    /// PLAIN, SA, C, U, USA or P.
    #[arg(long, default_value = "C")]
    pub kind: String,
    #[arg(long, default_value = "conj")]
    pub f: String,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.5, 1.0])]
    pub delta_grid: Vec<f64>,
    #[arg(long, default_value_t = 6)]
    pub dim: usize,
    #[arg(long, default_value_t = 40)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `disc:r`, `interval:r` or `lattice:pitch,r`.
    #[arg(long, default_value = "disc:1")]
    pub set: String,
    /// Witness files to revalidate instead of searching.
    #[arg(long)]
    pub input: Vec<PathBuf>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HolderParams {
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7, 0.9])]
    pub alpha_grid: Vec<f64>,
    #[arg(long, default_value = "psi")]
    pub f: String,
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 40)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Spectral radius cap.
    #[arg(long, default_value_t = 1.0)]
    pub r_cap: f64,
    /// Restrict spectra to the real interval [−r_cap, r_cap].
    #[arg(long)]
    pub real: bool,
    /// Run the quasicommutator experiment (unit disc) instead of the ratio search.
    #[arg(long)]
    pub quasi: bool,
    /// Instances per alpha for the quasicommutator experiment.
    #[arg(long, default_value_t = 300)]
    pub instances: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MccCheckParams {
    #[arg(long, default_values_t = ["conj".to_string()])]
    pub f: Vec<String>,
    #[arg(long, default_value_t = 500)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

serde_default_from_flags!(
    MultnormParams,
    FourierCheckParams,
    LatticeBoundParams,
    OmegaParams,
    DoiCheckParams,
    SearchExtremalParams,
    HolderParams,
    MccCheckParams
);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    Multnorm(MultnormParams),
    FourierCheck(FourierCheckParams),
    LatticeBound(LatticeBoundParams),
    Omega(OmegaParams),
    DoiCheck(DoiCheckParams),
    SearchExtremal(SearchExtremalParams),
    Holder(HolderParams),
    MccCheck(MccCheckParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Multnorm(_) => "multnorm",
            Experiment::FourierCheck(_) => "fourier-check",
            Experiment::LatticeBound(_) => "lattice-bound",
            Experiment::Omega(_) => "omega",
            Experiment::DoiCheck(_) => "doi-check",
            Experiment::SearchExtremal(_) => "search-extremal",
            Experiment::Holder(_) => "holder",
            Experiment::MccCheck(_) => "mcc-check",
        }
    }

    /// Artifact file stem.
    pub fn stem(&self) -> String {
        self.name().replace('-', "_")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    /// Used unless `--out-dir` is given; takes precedence over `OPMOD_OUT_DIR`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
}

/// On-disk layout: `{"schema_version", "command", "params", "out_dir"?, "workers"?}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    schema_version: u32,
    command: String,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig { schema_version: CONFIG_SCHEMA_VERSION, experiment, out_dir: None, workers: None }
    }

    pub fn from_json(bytes: &[u8]) -> CliResult<Self> {
        let bad = |e: serde_json::Error| CliError::config(format!("invalid config: {e}"));
        let file: ConfigFile = serde_json::from_slice(bytes).map_err(bad)?;
        if file.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "config schema version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        if file.workers == Some(0) {
            return Err(CliError::config("workers must be positive"));
        }
        let params = if file.params.is_null() { serde_json::json!({}) } else { file.params };
        let experiment = serde_json::from_value(serde_json::json!({ "command": file.command, "params": params })).map_err(bad)?;
        Ok(ExperimentConfig { schema_version: file.schema_version, experiment, out_dir: file.out_dir, workers: file.workers })
    }

    pub fn to_json(&self) -> CliResult<Vec<u8>> {
        let tagged = serde_json::to_value(&self.experiment)?;
        let file = ConfigFile {
            schema_version: self.schema_version,
            command: tagged["command"].as_str().unwrap_or_default().to_string(),
            params: tagged["params"].clone(),
            out_dir: self.out_dir.clone(),
            workers: self.workers,
        };
        let mut out = serde_json::to_vec_pretty(&file)?;
        out.push(b'\n');
        Ok(out)
    }
}
