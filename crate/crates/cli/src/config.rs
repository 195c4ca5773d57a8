use std::path::{Path, PathBuf};

use nvsensor_core::analytics::Timing;
use nvsensor_core::estimation::Sampling;
use nvsensor_core::optimizer::DEFAULT_N_MAX;
use nvsensor_core::{NoiseModel, PhysicalConstants, SensorParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Required by the stochastic subcommands.
    pub seed: Option<u64>,
    pub constants: PhysicalConstants,
    pub sensor: SensorSection,
    pub noise: NoiseSection,
    pub timing: TimingSection,
    pub run: RunSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    pub t2e: f64,
    pub omega: f64,
    pub n_transfers: u32,
    pub alpha: f64,
    pub shots_m: u64,
    pub gate_epsilon: f64,
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            t2e: 1e-6,
            omega: 1e4,
            n_transfers: 16,
            alpha: std::f64::consts::FRAC_1_SQRT_2,
            shots_m: 10_000,
            gate_epsilon: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Markovian,
    #[default]
    QuasiStatic,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub kind: NoiseKind,
    /// Defaults to `sensor.t2e`.
    pub t2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingSection {
    pub tau_p: f64,
    pub tau_w: f64,
    pub tau_m: f64,
    /// Add the free-evolution time to the hybrid cycle.
    pub extended: bool,
    /// Time available for the fixed-total-time comparison (s).
    pub total_time: Option<f64>,
}

impl Default for TimingSection {
    fn default() -> Self {
        let t = Timing::default();
        Self { tau_p: t.tau_p, tau_w: t.tau_w, tau_m: t.tau_m, extended: false, total_time: None }
    }
}

impl TimingSection {
    pub fn timing(&self) -> Timing {
        Timing { tau_p: self.tau_p, tau_w: self.tau_w, tau_m: self.tau_m }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub repetitions: u32,
    /// Monte Carlo trajectories in `simulate`.
    pub shots: u64,
    pub sampling: Sampling,
    pub n_list: Vec<u32>,
    pub n_max: u32,
    /// Gate-error grid for `figure3`; the default log grid when absent.
    pub eps_grid: Option<Vec<f64>>,
    /// Reduction check horizon (s); `10/max(|A|, |A'|)` when absent.
    pub validate_t_max: Option<f64>,
    pub validate_steps: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            repetitions: 200,
            shots: 100_000,
            sampling: Sampling::Exact,
            n_list: vec![1, 2, 4, 8, 16, 32, 64],
            n_max: DEFAULT_N_MAX,
            eps_grid: None,
            validate_t_max: None,
            validate_steps: 400,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn noise_model(&self) -> NoiseModel {
        let t2 = self.noise.t2.unwrap_or(self.sensor.t2e);
        match self.noise.kind {
            NoiseKind::None => NoiseModel::None,
            NoiseKind::Markovian => NoiseModel::Markovian { t2 },
            NoiseKind::QuasiStatic => NoiseModel::QuasiStatic { t2 },
        }
    }

    pub fn sensor_params(&self) -> Result<SensorParams, CliError> {
        let s = &self.sensor;
        let params = SensorParams {
            t2e: s.t2e,
            omega: s.omega,
            n_transfers: s.n_transfers,
            alpha: s.alpha,
            shots_m: s.shots_m,
            gate_epsilon: s.gate_epsilon,
            noise: self.noise_model(),
        };
        params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(params)
    }

    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Config("a seed is required (set `seed` in the config or pass --seed)".into()))
    }
}
