//! Shot sampling, inversion to `ω̂`, and comparison of the spread of `ω̂`
//! with the error-propagation prediction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics;
use crate::error::{Error, Result};
use crate::protocol::{run_hybrid_exact, run_hybrid_trajectories, SensorParams};

/// Fraction of clamped estimates above which a run is flagged.
pub const CLAMP_RATE_LIMIT: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub omega_hat: f64,
    /// `|(1 − 2p̂)/C| > 1` and the arcsine argument was clamped.
    pub clamped: bool,
}

/// Inverts `p = ½ − ½·C·sin(α√N·ω·T2e)` on the principal branch, with the
/// contrast `C` taken as known.
pub fn estimate_omega(p_hat: f64, params: &SensorParams) -> Result<Estimate> {
    params.validate()?;
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::InvalidArgument(format!("p_hat must be in [0, 1], got {p_hat}")));
    }
    let c = analytics::visibility(params);
    if c <= 0.0 {
        return Err(Error::NoSignal);
    }
    let s = (1.0 - 2.0 * p_hat) / c;
    let clamped = s.abs() > 1.0;
    let scale = params.alpha * (params.n_transfers as f64).sqrt() * params.t2e;
    Ok(Estimate { omega_hat: s.clamp(-1.0, 1.0).asin() / scale, clamped })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// `M` Bernoulli draws from the exact channel's click probability.
    #[default]
    Exact,
    /// `M` independent Monte Carlo trajectories.
    Trajectory,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    pub params: SensorParams,
    #[serde(rename = "shots_M")]
    pub shots_m: u64,
    pub repetitions: u32,
    pub seed: u64,
    pub sampling: Sampling,
    pub estimates: Vec<f64>,
    pub mean: f64,
    /// Unbiased (`n − 1`) sample standard deviation of `estimates`.
    pub empirical_std: f64,
    pub analytic_std: f64,
    pub clamp_count: u32,
    /// Clamp rate exceeded [`CLAMP_RATE_LIMIT`].
    pub flagged: bool,
}

impl EstimationRun {
    pub fn new(params: SensorParams, repetitions: u32, seed: u64) -> Self {
        Self {
            params,
            shots_m: params.shots_m,
            repetitions,
            seed,
            sampling: Sampling::Exact,
            estimates: Vec::new(),
            mean: f64::NAN,
            empirical_std: f64::NAN,
            analytic_std: f64::NAN,
            clamp_count: 0,
            flagged: false,
        }
    }

    pub fn with_sampling(self, sampling: Sampling) -> Self {
        Self { sampling, ..self }
    }

    pub fn clamp_rate(&self) -> f64 {
        self.clamp_count as f64 / self.repetitions.max(1) as f64
    }
}

/// Per-repetition seed.
pub fn repetition_seed(seed: u64, index: u32) -> u64 {
    seed ^ index as u64
}

/// Fills the estimates and statistics of `run`. Repetitions run in parallel;
/// each draws from its own seeded stream, so the result does not depend on
/// scheduling.
pub fn run_estimation(run: EstimationRun) -> Result<EstimationRun> {
    if run.repetitions < 2 {
        return Err(Error::InvalidArgument("need at least 2 repetitions".into()));
    }
    if run.shots_m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let params = SensorParams { shots_m: run.shots_m, ..run.params };
    params.validate()?;
    let p_exact = run_hybrid_exact(&params)?.p_click.clamp(0.0, 1.0);
    let binomial = Binomial::new(run.shots_m, p_exact)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let draws: Vec<Estimate> = (0..run.repetitions)
        .into_par_iter()
        .map(|i| {
            let seed = repetition_seed(run.seed, i);
            let p_hat = match run.sampling {
                Sampling::Exact => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    binomial.sample(&mut rng) as f64 / run.shots_m as f64
                }
                Sampling::Trajectory => run_hybrid_trajectories(&params, run.shots_m, seed)?.p_click,
            };
            estimate_omega(p_hat, &params)
        })
        .collect::<Result<_>>()?;

    let estimates: Vec<f64> = draws.iter().map(|e| e.omega_hat).collect();
    let clamp_count = draws.iter().filter(|e| e.clamped).count() as u32;
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let flagged = clamp_count as f64 / n > CLAMP_RATE_LIMIT;
    Ok(EstimationRun {
        params,
        estimates,
        mean,
        empirical_std: var.sqrt(),
        analytic_std: analytics::uncertainty(&params)?,
        clamp_count,
        flagged,
        ..run
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Hybrid,
    Conventional,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Hybrid => "hybrid",
            Scheme::Conventional => "conventional",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: Scheme,
    #[serde(rename = "N")]
    pub n: u32,
    pub alpha: f64,
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub delta_omega: f64,
    /// Baseline `delta_omega` divided by this row's.
    pub ratio_r: f64,
    pub delta_omega_empirical: Option<f64>,
}

pub const SWEEP_HEADER: [&str; 8] =
    ["scheme", "N", "alpha", "epsilon", "M", "delta_omega", "ratio_r", "delta_omega_empirical"];

/// `δω` for each `N` at fixed `M`, preceded by a Ramsey baseline row
/// (single transfer, ideal gates, same `α`). With `repetitions ≥ 2` every row
/// also carries the empirical spread from [`run_estimation`].
pub fn sweep_n(params: &SensorParams, n_list: &[u32], repetitions: u32, seed: u64) -> Result<Vec<SweepRow>> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("N list is empty".into()));
    }
    let baseline = SensorParams { n_transfers: 1, gate_epsilon: 0.0, ..*params };
    let cases = std::iter::once((Scheme::Conventional, baseline))
        .chain(n_list.iter().map(|&n| (Scheme::Hybrid, params.with_transfers(n))));

    let mut rows = Vec::with_capacity(n_list.len() + 1);
    let mut base_delta = f64::NAN;
    for (idx, (scheme, p)) in cases.enumerate() {
        let delta_omega = analytics::uncertainty(&p)?;
        if idx == 0 {
            base_delta = delta_omega;
        }
        let delta_omega_empirical = if repetitions >= 2 {
            let row_seed = seed ^ ((idx as u64) << 32);
            Some(run_estimation(EstimationRun::new(p, repetitions, row_seed))?.empirical_std)
        } else {
            None
        };
        rows.push(SweepRow {
            scheme,
            n: p.n_transfers,
            alpha: p.alpha,
            epsilon: p.gate_epsilon,
            m: p.shots_m,
            delta_omega,
            ratio_r: base_delta / delta_omega,
            delta_omega_empirical,
        });
    }
    Ok(rows)
}
