//! The two sensing sequences run on the spin engine.
//!
//! * Conventional Ramsey: `|+⟩_e`, free evolution for `t`, σ_y readout.
//! * Hybrid transfer: nuclear `|+⟩`, then `N` × {CNOT(n→e), wait `t`, CNOT(n→e)},
//!   a SWAP to bring the nuclear memory onto the electron, σ_y readout. Every
//!   two-qubit gate is followed by depolarizing noise of strength ε; the waits
//!   carry the electron dephasing law with independent noise per segment.
//!
//! Both sequences are available as an exact channel calculation and as
//! seeded Monte Carlo pure-state trajectories.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spin::{
    sample_quasi_static_detuning, Basis, DensityMatrix, GateNoise, GateOp, NoiseModel, Qubit,
    StateVector,
};

const TRANSFER_CNOT: GateOp = GateOp::Cnot { control: Qubit::Nuclear, target: Qubit::Electron };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorParams {
    /// Electron dephasing time T*₂ₑ (s).
    pub t2e: f64,
    /// Detuning to estimate (rad/s).
    pub omega: f64,
    /// Number of electron→nucleus transfers.
    pub n_transfers: u32,
    /// Exposure parameter; each segment lasts `(α/√N)·T2e`.
    pub alpha: f64,
    /// Measurement repetitions.
    pub shots_m: u64,
    /// Depolarizing error per two-qubit gate.
    pub gate_epsilon: f64,
    pub noise: NoiseModel,
}

impl SensorParams {
    /// Quasi-static dephasing with `T2 = t2e` and ideal gates.
    pub fn new(t2e: f64, omega: f64, n_transfers: u32, alpha: f64, shots_m: u64) -> Self {
        Self {
            t2e,
            omega,
            n_transfers,
            alpha,
            shots_m,
            gate_epsilon: 0.0,
            noise: NoiseModel::QuasiStatic { t2: t2e },
        }
    }

    pub fn with_epsilon(self, gate_epsilon: f64) -> Self {
        Self { gate_epsilon, ..self }
    }

    pub fn with_noise(self, noise: NoiseModel) -> Self {
        Self { noise, ..self }
    }

    pub fn with_transfers(self, n_transfers: u32) -> Self {
        Self { n_transfers, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.t2e.is_finite() && self.t2e > 0.0) {
            return fail(format!("T2e must be positive, got {}", self.t2e));
        }
        if !self.omega.is_finite() {
            return fail(format!("omega must be finite, got {}", self.omega));
        }
        if self.n_transfers == 0 {
            return fail("N must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail(format!("alpha must be positive, got {}", self.alpha));
        }
        if self.shots_m == 0 {
            return fail("M must be at least 1".into());
        }
        GateNoise::new(self.gate_epsilon).map_err(|e| Error::InvalidParams(e.to_string()))?;
        self.noise.validate().map_err(|e| Error::InvalidParams(e.to_string()))
    }

    /// `k = α/√N`.
    pub fn k(&self) -> f64 {
        self.alpha / (self.n_transfers as f64).sqrt()
    }

    /// Duration of one free-evolution segment, `k·T2e`.
    pub fn segment_time(&self) -> f64 {
        self.k() * self.t2e
    }

    /// `θ = N ω t = α √N ω T2e`.
    pub fn total_phase(&self) -> f64 {
        self.n_transfers as f64 * self.omega * self.segment_time()
    }

    /// Set when `|θ| ≥ π/2`, beyond which the σ_y signal can no longer be
    /// unwrapped unambiguously.
    pub fn phase_wrapped(&self) -> bool {
        self.total_phase().abs() >= FRAC_PI_2
    }

    pub fn gate_noise(&self) -> Result<GateNoise> {
        GateNoise::new(self.gate_epsilon)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    /// Probability of the `σ_y = +1` outcome.
    pub p_click: f64,
    /// `|ρ_e[0,1]|` of the read-out electron.
    pub coherence: f64,
    pub accumulated_phase: f64,
    pub phase_wrap: bool,
    /// Pre-measurement state.
    pub final_state: DensityMatrix,
}

fn readout(state: DensityMatrix, phase: f64) -> Result<ProtocolOutcome> {
    let (_, p_click) = state.measure_basis(Qubit::Electron, Basis::Y)?;
    let electron = if state.dim() == 4 { state.partial_trace(Qubit::Electron)? } else { state.clone() };
    Ok(ProtocolOutcome {
        p_click,
        coherence: electron.entry(0, 1).norm(),
        accumulated_phase: phase,
        phase_wrap: phase.abs() >= FRAC_PI_2,
        final_state: state,
    })
}

/// Single-spin Ramsey sequence with exposure `t_expose`.
pub fn run_conventional(params: &SensorParams, t_expose: f64) -> Result<ProtocolOutcome> {
    params.validate()?;
    if !(t_expose.is_finite() && t_expose >= 0.0) {
        return Err(Error::InvalidArgument(format!("exposure must be >= 0, got {t_expose}")));
    }
    let rho = DensityMatrix::ground(2)?
        .apply_gate(&GateOp::RotY { qubit: Qubit::Electron, angle: FRAC_PI_2 })?
        .apply_phase(params.omega, t_expose)
        .apply_dephasing(&params.noise, t_expose)?;
    readout(rho, params.omega * t_expose)
}

/// Hybrid N-transfer sequence evaluated as an exact channel.
pub fn run_hybrid_exact(params: &SensorParams) -> Result<ProtocolOutcome> {
    params.validate()?;
    let gate_noise = params.gate_noise()?;
    let t = params.segment_time();

    let mut rho = DensityMatrix::ground(4)?
        .apply_gate(&GateOp::RotY { qubit: Qubit::Nuclear, angle: FRAC_PI_2 })?;
    for _ in 0..params.n_transfers {
        rho = rho.apply_gate(&TRANSFER_CNOT)?.apply_depolarizing(gate_noise)?;
        rho = rho.apply_phase(params.omega, t).apply_dephasing(&params.noise, t)?;
        rho = rho.apply_gate(&TRANSFER_CNOT)?.apply_depolarizing(gate_noise)?;
    }
    rho = rho.apply_gate(&GateOp::Swap)?.apply_depolarizing(gate_noise)?;
    readout(rho, params.total_phase())
}

/// Empirical click statistics from Monte Carlo trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalOutcome {
    pub p_click: f64,
    /// Binomial standard error `√(p(1−p)/shots)` at the empirical `p`.
    pub std_error: f64,
    pub clicks: u64,
    pub shots: u64,
    pub seed: u64,
}

impl EmpiricalOutcome {
    fn from_counts(clicks: u64, shots: u64, seed: u64) -> Self {
        let p = clicks as f64 / shots as f64;
        Self {
            p_click: p,
            std_error: (p * (1.0 - p) / shots as f64).sqrt(),
            clicks,
            shots,
            seed,
        }
    }
}

/// Free evolution of one trajectory: deterministic phase plus a sampled noise
/// realisation (quasi-static detuning or Markovian phase flip).
fn evolve_segment<R: Rng>(psi: &mut StateVector, omega: f64, t: f64, noise: &NoiseModel, rng: &mut R) {
    match *noise {
        NoiseModel::None => psi.apply_phase(omega * t),
        NoiseModel::QuasiStatic { t2 } => {
            let delta = sample_quasi_static_detuning(rng, t2);
            psi.apply_phase((omega + delta) * t);
        }
        NoiseModel::Markovian { .. } => {
            psi.apply_phase(omega * t);
            let flip = 0.5 * (1.0 - noise.coherence_factor(t));
            if rng.random_bool(flip) {
                psi.apply_phase_flip();
            }
        }
    }
}

/// With probability ε, replace the state by a uniformly random basis state
/// (ensemble average `I/4`).
fn depolarize<R: Rng>(psi: &mut StateVector, epsilon: f64, rng: &mut R) {
    if epsilon > 0.0 && rng.random_bool(epsilon) {
        *psi = StateVector::basis(psi.dim(), rng.random_range(0..psi.dim()));
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Ok(())
}

/// Conventional Ramsey sequence as seeded trajectories.
pub fn run_conventional_trajectories(
    params: &SensorParams,
    t_expose: f64,
    shots: u64,
    seed: u64,
) -> Result<EmpiricalOutcome> {
    params.validate()?;
    check_shots(shots)?;
    let prepare = GateOp::RotY { qubit: Qubit::Electron, angle: FRAC_PI_2 }.unitary(2)?;
    let readout_rot = GateOp::RotX { qubit: Qubit::Electron, angle: FRAC_PI_2 }.unitary(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clicks = 0u64;
    for _ in 0..shots {
        let mut psi = StateVector::basis(2, 0);
        psi.apply_unitary(&prepare);
        evolve_segment(&mut psi, params.omega, t_expose, &params.noise, &mut rng);
        psi.apply_unitary(&readout_rot);
        // RotX(π/2) sends |1_y⟩ to |0⟩
        let p_click = 1.0 - psi.z_probability_one(Qubit::Electron);
        if rng.random_bool(p_click) {
            clicks += 1;
        }
    }
    Ok(EmpiricalOutcome::from_counts(clicks, shots, seed))
}

struct HybridUnitaries {
    prepare: CMatrix,
    cnot: CMatrix,
    swap: CMatrix,
    readout: CMatrix,
}

impl HybridUnitaries {
    fn new() -> Result<Self> {
        Ok(Self {
            prepare: GateOp::RotY { qubit: Qubit::Nuclear, angle: FRAC_PI_2 }.unitary(4)?,
            cnot: TRANSFER_CNOT.unitary(4)?,
            swap: GateOp::Swap.unitary(4)?,
            readout: GateOp::RotX { qubit: Qubit::Electron, angle: FRAC_PI_2 }.unitary(4)?,
        })
    }
}

/// Hybrid sequence as seeded pure-state trajectories; each shot draws fresh
/// noise for every segment and gate and samples the σ_y readout once.
pub fn run_hybrid_trajectories(params: &SensorParams, shots: u64, seed: u64) -> Result<EmpiricalOutcome> {
    params.validate()?;
    check_shots(shots)?;
    let gates = HybridUnitaries::new()?;
    let t = params.segment_time();
    let eps = params.gate_epsilon;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clicks = 0u64;
    for _ in 0..shots {
        let mut psi = StateVector::basis(4, 0);
        psi.apply_unitary(&gates.prepare);
        for _ in 0..params.n_transfers {
            psi.apply_unitary(&gates.cnot);
            depolarize(&mut psi, eps, &mut rng);
            evolve_segment(&mut psi, params.omega, t, &params.noise, &mut rng);
            psi.apply_unitary(&gates.cnot);
            depolarize(&mut psi, eps, &mut rng);
        }
        psi.apply_unitary(&gates.swap);
        depolarize(&mut psi, eps, &mut rng);
        psi.apply_unitary(&gates.readout);
        let p_click = 1.0 - psi.z_probability_one(Qubit::Electron);
        if rng.random_bool(p_click) {
            clicks += 1;
        }
    }
    Ok(EmpiricalOutcome::from_counts(clicks, shots, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseOp {
    RotY,
    Cnot,
    Wait,
    Swap,
    RotX,
    Measure,
}

impl fmt::Display for PulseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PulseOp::RotY => "RotY(pi/2)",
            PulseOp::Cnot => "CNOT",
            PulseOp::Wait => "wait",
            PulseOp::Swap => "SWAP",
            PulseOp::RotX => "RotX(pi/2)",
            PulseOp::Measure => "measure",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseStep {
    pub op: PulseOp,
    /// Qubit indices (0 = electron, 1 = nuclear); CNOT lists control first.
    pub qubits: Vec<usize>,
    pub duration_s: f64,
    pub noisy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSequence {
    pub steps: Vec<PulseStep>,
}

impl PulseSequence {
    pub fn count(&self, op: PulseOp) -> usize {
        self.steps.iter().filter(|s| s.op == op).count()
    }

    pub fn two_qubit_gates(&self) -> usize {
        self.count(PulseOp::Cnot) + self.count(PulseOp::Swap)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            let qubits: Vec<&str> = step
                .qubits
                .iter()
                .map(|&q| if q == 0 { "e" } else { "n" })
                .collect();
            write!(f, "{:>4}  {:<11} [{}]", i + 1, step.op.to_string(), qubits.join("->"))?;
            if step.op == PulseOp::Wait {
                write!(f, "  {:.6e} s", step.duration_s)?;
            }
            if step.noisy {
                write!(f, "  (noisy)")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Ordered gate/wait/measure listing of the hybrid sequence.
pub fn transcript(params: &SensorParams) -> PulseSequence {
    let e = Qubit::Electron.index();
    let n = Qubit::Nuclear.index();
    let gate_noisy = params.gate_epsilon > 0.0;
    let wait_noisy = params.noise != NoiseModel::None;
    let step = |op, qubits: Vec<usize>, duration_s, noisy| PulseStep { op, qubits, duration_s, noisy };

    let mut steps = vec![step(PulseOp::RotY, vec![n], 0.0, false)];
    for _ in 0..params.n_transfers {
        steps.push(step(PulseOp::Cnot, vec![n, e], 0.0, gate_noisy));
        steps.push(step(PulseOp::Wait, vec![e], params.segment_time(), wait_noisy));
        steps.push(step(PulseOp::Cnot, vec![n, e], 0.0, gate_noisy));
    }
    steps.push(step(PulseOp::Swap, vec![e, n], 0.0, gate_noisy));
    steps.push(step(PulseOp::RotX, vec![e], 0.0, false));
    steps.push(step(PulseOp::Measure, vec![e], 0.0, false));
    PulseSequence { steps }
}
