//! Command-line front end: config loading, subcommands and output files.

pub mod commands;
pub mod config;
pub mod plot;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{run, Artifact, Outcome};
pub use config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed config, unwritable output.
    #[error("{0}")]
    Config(String),
    /// The inputs are well-formed but outside the model's validity or the
    /// estimator's regime.
    #[error("{0}")]
    Regime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Regime(_) => 1,
        }
    }
}

impl From<nvsensor_core::Error> for CliError {
    fn from(e: nvsensor_core::Error) -> Self {
        use nvsensor_core::Error as E;
        match e {
            E::EffectiveModelInvalid { .. }
            | E::DivergentUncertainty { .. }
            | E::TotalDepolarization
            | E::ApproximationInvalid(_)
            | E::NoSignal
            | E::DegenerateEstimator(_) => CliError::Regime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nvsensor", version, about = "Hybrid electron/nuclear-spin NV magnetometer simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// RNG seed (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output directory; results go to stdout when neither this nor
    /// `output.dir` is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Measurements per estimate, M (overrides `sensor.shots_m`).
    #[arg(long, global = true)]
    pub shots: Option<u64>,

    /// Estimation repetitions (overrides `run.repetitions`).
    #[arg(long, global = true)]
    pub reps: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Compare the full six-level Hamiltonian with the two-qubit model.
    ValidateModel,
    /// Exact channel, trajectories and repeated estimation for one setting.
    Simulate,
    /// Uncertainty against the number of transfers.
    SweepN,
    /// Optimal relative sensitivity against gate error.
    Figure3,
    /// Cycle times of both schemes.
    TimeBudget,
    /// Pulse sequence listing.
    Transcript,
}

impl Cli {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        if let Some(dir) = &self.out {
            cfg.output.dir = Some(dir.clone());
        }
        if let Some(format) = self.format {
            cfg.output.format = Some(format);
        }
        if let Some(shots) = self.shots {
            cfg.sensor.shots_m = shots;
        }
        if let Some(reps) = self.reps {
            cfg.run.repetitions = reps;
        }
        Ok(cfg)
    }
}
