//! Closed-form sensitivity formulas.
//!
//! Nothing in here touches the density-matrix engine; the protocol tests
//! compare the two paths against each other.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::SensorParams;
use crate::spin::NoiseModel;

fn sqrt_e() -> f64 {
    0.5f64.exp()
}

/// Error propagation `√(P(1−P)/M) / |dP/dω|`.
pub fn shot_noise_uncertainty(p: f64, dp_domega: f64, m: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateEstimator(format!("probability {p} is not in (0, 1)")));
    }
    if dp_domega == 0.0 || !dp_domega.is_finite() {
        return Err(Error::DegenerateEstimator(format!("slope dP/domega = {dp_domega}")));
    }
    if m == 0 {
        return Err(Error::DegenerateEstimator("M = 0".into()));
    }
    Ok((p * (1.0 - p) / m as f64).sqrt() / dp_domega.abs())
}

/// Hybrid-scheme uncertainty with quasi-static dephasing at `T2e` and ideal
/// gates, at finite phase:
///
/// `(e^{α²}/α)·√(1 − e^{−2α²} sin²θ) / (√M·√N·T2e·|cos θ|)`, `θ = α√N ωT2e`.
pub fn hybrid_uncertainty(params: &SensorParams) -> Result<f64> {
    params.validate()?;
    let SensorParams { t2e, omega, alpha, .. } = *params;
    let n = params.n_transfers as f64;
    let m = params.shots_m as f64;
    let theta = alpha * n.sqrt() * omega * t2e;
    let cos = theta.cos();
    if cos.abs() < 1e-15 {
        return Err(Error::DivergentUncertainty { phase: theta });
    }
    let s = (-alpha * alpha).exp() * theta.sin();
    Ok((alpha * alpha).exp() / alpha * (1.0 - s * s).sqrt() / (m.sqrt() * n.sqrt() * t2e * cos.abs()))
}

/// The `ω → 0` limit of [`hybrid_uncertainty`]: `e^{α²}/(α√(MN)·T2e)`.
pub fn hybrid_uncertainty_small_phase(params: &SensorParams) -> Result<f64> {
    params.validate()?;
    let (a, n, m) = (params.alpha, params.n_transfers as f64, params.shots_m as f64);
    Ok((a * a).exp() / (a * (m * n).sqrt() * params.t2e))
}

/// Ramsey uncertainty at exposure `t = αT2e` under quasi-static dephasing.
pub fn conventional_uncertainty(t2e: f64, omega: f64, alpha: f64, m: u64) -> Result<f64> {
    let params = SensorParams::new(t2e, omega, 1, alpha, m);
    hybrid_uncertainty(&params)
}

/// `√2·e^{1/2}/(√M·T2e)`, the Ramsey optimum at `α = 1/√2`.
pub fn conventional_uncertainty_opt(t2e: f64, m: u64) -> f64 {
    SQRT_2 * sqrt_e() / ((m as f64).sqrt() * t2e)
}

/// Small-phase uncertainty when the coherence decays as `e^{−α√N}` (Markovian
/// dephasing at `T2e`) instead of `e^{−α²}`.
pub fn markovian_uncertainty(alpha: f64, n: u32, t2e: f64, m: u64) -> f64 {
    let n = n as f64;
    (alpha * n.sqrt()).exp() / (alpha * (m as f64 * n).sqrt() * t2e)
}

/// Contrast `C` of the hybrid signal `P = ½ − ½·C·sin θ`: gate survival
/// `(1−ε)^{2N+1}` times the product of the `N` segment decay factors.
pub fn visibility(params: &SensorParams) -> f64 {
    let n = params.n_transfers as f64;
    let t = params.alpha / n.sqrt() * params.t2e;
    let gates = (1.0 - params.gate_epsilon).powi(2 * params.n_transfers as i32 + 1);
    let dephasing = match params.noise {
        NoiseModel::None => 1.0,
        NoiseModel::Markovian { t2 } => (-n * t / t2).exp(),
        NoiseModel::QuasiStatic { t2 } => (-n * (t / t2).powi(2)).exp(),
    };
    gates * dephasing
}

/// Error propagation for the hybrid signal with general contrast
/// ([`visibility`]) at finite phase.
pub fn uncertainty(params: &SensorParams) -> Result<f64> {
    params.validate()?;
    let c = visibility(params);
    if c <= 0.0 {
        return Err(Error::NoSignal);
    }
    let slope_scale = params.alpha * (params.n_transfers as f64).sqrt() * params.t2e;
    let theta = slope_scale * params.omega;
    if theta.cos().abs() < 1e-15 {
        return Err(Error::DivergentUncertainty { phase: theta });
    }
    let p = 0.5 - 0.5 * c * theta.sin();
    let dp = -0.5 * c * theta.cos() * slope_scale;
    shot_noise_uncertainty(p, dp, params.shots_m)
}

/// `e^{α²}/((1−ε)^{2N+1}·α·√(MN)·T2e)`: small-phase uncertainty with
/// depolarizing gates.
pub fn gate_error_uncertainty(params: &SensorParams) -> Result<f64> {
    params.validate()?;
    if params.gate_epsilon >= 1.0 {
        return Err(Error::TotalDepolarization);
    }
    let survive = (1.0 - params.gate_epsilon).powi(2 * params.n_transfers as i32 + 1);
    Ok(hybrid_uncertainty_small_phase(params)? / survive)
}

/// Relative sensitivity `√2·e^{1/2}·(1−ε)^{2N+1}·e^{−α²}·α·√N`.
pub fn ratio_r(epsilon: f64, n: u32, alpha: f64) -> f64 {
    SQRT_2
        * sqrt_e()
        * (1.0 - epsilon).powi(2 * n as i32 + 1)
        * (-alpha * alpha).exp()
        * alpha
        * (n as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipProbability {
    pub exact: f64,
    /// Leading order in `k = t/T2`.
    pub approx: f64,
    pub abs_error: f64,
}

/// Phase-flip probability `(1 − f(t))/2` for the coherence law `f`.
pub fn flip_probability(noise: &NoiseModel, t: f64) -> Result<FlipProbability> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    noise.validate()?;
    let (exact, approx) = match *noise {
        NoiseModel::None => (0.0, 0.0),
        NoiseModel::Markovian { t2 } => {
            let k = t / t2;
            (-0.5 * (-k).exp_m1(), 0.5 * k)
        }
        NoiseModel::QuasiStatic { t2 } => {
            let k = t / t2;
            (-0.5 * (-k * k).exp_m1(), 0.5 * k * k)
        }
    };
    Ok(FlipProbability { exact, approx, abs_error: (exact - approx).abs() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZenoSurvival {
    /// `(1 − Γ²τ²)^N` with `τ = t/N`.
    pub product: f64,
    /// `1 − Γ²t²/N`.
    pub first_order: f64,
}

pub fn zeno_survival(gamma: f64, t: f64, n: u32) -> Result<ZenoSurvival> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(gamma >= 0.0 && t >= 0.0 && gamma.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need gamma, t >= 0, got {gamma}, {t}")));
    }
    let gt = gamma * t / n as f64;
    if gt >= 1.0 {
        return Err(Error::ApproximationInvalid(gt));
    }
    let gt_total = gamma * t;
    Ok(ZenoSurvival {
        product: (1.0 - gt * gt).powi(n as i32),
        first_order: 1.0 - gt_total * gt_total / n as f64,
    })
}

/// Preparation, waiting and readout durations (s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub tau_p: f64,
    pub tau_w: f64,
    pub tau_m: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self { tau_p: 2e-6, tau_w: 25e-6, tau_m: 2e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeBudget {
    pub t_cycle_hybrid: f64,
    pub t_cycle_conv: f64,
    pub tau_p: f64,
    pub tau_w: f64,
    pub tau_m: f64,
    /// Free-evolution time included in `t_cycle_hybrid`.
    pub extended: bool,
    /// Set when `t_cycle_hybrid` is zero.
    pub degenerate: bool,
}

/// Cycle times of both schemes. The hybrid cycle is `N·τ_w`; with `extended`
/// the `N` free-evolution segments are added as well (gates take no time).
/// The Ramsey cycle is `τ_p + T2e/√2 + τ_M`.
pub fn time_budget(params: &SensorParams, timing: &Timing, extended: bool) -> Result<TimeBudget> {
    params.validate()?;
    let Timing { tau_p, tau_w, tau_m } = *timing;
    for (name, v) in [("tau_p", tau_p), ("tau_w", tau_w), ("tau_M", tau_m)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {v}")));
        }
    }
    let n = params.n_transfers as f64;
    let mut t_cycle_hybrid = n * tau_w;
    if extended {
        t_cycle_hybrid += n * params.alpha / n.sqrt() * params.t2e;
    }
    Ok(TimeBudget {
        t_cycle_hybrid,
        t_cycle_conv: tau_p + params.t2e / SQRT_2 + tau_m,
        tau_p,
        tau_w,
        tau_m,
        extended,
        degenerate: t_cycle_hybrid == 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ComparisonMode {
    /// Both schemes get the same number of measurements `M`.
    FixedShots,
    /// Both schemes get `total_time`; each runs `⌊total_time / t_cycle⌋` shots.
    FixedTotalTime { total_time: f64, timing: Timing },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub delta_omega: f64,
    pub delta_omega_conv: f64,
    /// `delta_omega_conv / delta_omega`.
    pub ratio_r: f64,
    pub shots_hybrid: u64,
    pub shots_conv: u64,
    pub small_phase: bool,
    pub phase_wrap: bool,
    pub mode: ComparisonMode,
}

/// Hybrid vs optimal-Ramsey comparison. The hybrid side uses the general
/// contrast of [`visibility`]; with `small_phase` the `ω → 0` form is used.
pub fn sensitivity_report(
    params: &SensorParams,
    mode: ComparisonMode,
    small_phase: bool,
) -> Result<SensitivityReport> {
    params.validate()?;
    let (shots_hybrid, shots_conv) = match mode {
        ComparisonMode::FixedShots => (params.shots_m, params.shots_m),
        ComparisonMode::FixedTotalTime { total_time, timing } => {
            let budget = time_budget(params, &timing, false)?;
            if budget.degenerate {
                return Err(Error::InvalidArgument("hybrid cycle time is zero".into()));
            }
            let count = |cycle: f64| (total_time / cycle).floor();
            let (mh, mc) = (count(budget.t_cycle_hybrid), count(budget.t_cycle_conv));
            if !(mh >= 1.0 && mc >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "total time {total_time} s is shorter than one cycle"
                )));
            }
            (mh as u64, mc as u64)
        }
    };
    let hybrid = SensorParams { shots_m: shots_hybrid, ..*params };
    let delta_omega = if small_phase {
        let c = visibility(&hybrid);
        if c <= 0.0 {
            return Err(Error::NoSignal);
        }
        1.0 / (c * hybrid.alpha * ((shots_hybrid * hybrid.n_transfers as u64) as f64).sqrt() * hybrid.t2e)
    } else {
        uncertainty(&hybrid)?
    };
    let delta_omega_conv = conventional_uncertainty_opt(params.t2e, shots_conv);
    Ok(SensitivityReport {
        delta_omega,
        delta_omega_conv,
        ratio_r: delta_omega_conv / delta_omega,
        shots_hybrid,
        shots_conv,
        small_phase,
        phase_wrap: params.phase_wrapped(),
        mode,
    })
}
