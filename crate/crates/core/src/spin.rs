//! Dense density-matrix engine for one qubit (the electron) or two qubits
//! (electron ⊗ nuclear, electron is the slow index: `|e n⟩ ↦ 2e + n`).
//!
//! Conventions: `RotX(θ) = exp(−iθσ_x/2)`, `RotY(θ) = exp(−iθσ_y/2)`, so
//! `RotY(π/2)|0⟩ = |+⟩`. Free evolution maps `|1⟩_e ↦ e^{−iωt}|1⟩_e`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Qubit {
    Electron,
    Nuclear,
}

impl Qubit {
    pub fn index(self) -> usize {
        match self {
            Qubit::Electron => 0,
            Qubit::Nuclear => 1,
        }
    }

    pub fn other(self) -> Qubit {
        match self {
            Qubit::Electron => Qubit::Nuclear,
            Qubit::Nuclear => Qubit::Electron,
        }
    }

    fn check(self, dim: usize) -> Result<()> {
        match (dim, self) {
            (4, _) | (2, Qubit::Electron) => Ok(()),
            _ => Err(Error::InvalidArgument(format!(
                "qubit {self:?} does not exist in a dimension-{dim} state"
            ))),
        }
    }
}

/// Bit of `qubit` in basis index `i` of a `dim`-dimensional state.
fn bit(i: usize, qubit: Qubit, dim: usize) -> usize {
    match (dim, qubit) {
        (2, _) => i,
        (_, Qubit::Electron) => i / 2,
        (_, Qubit::Nuclear) => i % 2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    RotX { qubit: Qubit, angle: f64 },
    RotY { qubit: Qubit, angle: f64 },
    Cnot { control: Qubit, target: Qubit },
    Swap,
}

impl GateOp {
    pub fn is_two_qubit(&self) -> bool {
        matches!(self, GateOp::Cnot { .. } | GateOp::Swap)
    }

    fn single(angle: f64, x_axis: bool) -> CMatrix {
        let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
        let cc = Complex64::new(c, 0.0);
        if x_axis {
            let off = Complex64::new(0.0, -s);
            CMatrix::from_row_slice(2, 2, &[cc, off, off, cc])
        } else {
            let sn = Complex64::new(s, 0.0);
            CMatrix::from_row_slice(2, 2, &[cc, -sn, sn, cc])
        }
    }

    fn embed(u: CMatrix, qubit: Qubit, dim: usize) -> CMatrix {
        match (dim, qubit) {
            (2, _) => u,
            (_, Qubit::Electron) => linalg::kron(&u, &linalg::identity(2)),
            (_, Qubit::Nuclear) => linalg::kron(&linalg::identity(2), &u),
        }
    }

    fn permutation(map: impl Fn(usize) -> usize) -> CMatrix {
        let mut u = CMatrix::zeros(4, 4);
        for col in 0..4 {
            u[(map(col), col)] = ONE;
        }
        u
    }

    /// Unitary of this gate on a state of dimension `dim`.
    pub fn unitary(&self, dim: usize) -> Result<CMatrix> {
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidArgument(format!("unsupported dimension {dim}")));
        }
        match *self {
            GateOp::RotX { qubit, angle } => {
                qubit.check(dim)?;
                Ok(Self::embed(Self::single(angle, true), qubit, dim))
            }
            GateOp::RotY { qubit, angle } => {
                qubit.check(dim)?;
                Ok(Self::embed(Self::single(angle, false), qubit, dim))
            }
            GateOp::Cnot { control, target } => {
                if dim != 4 {
                    return Err(Error::DimensionMismatch { expected: 4, actual: dim });
                }
                if control == target {
                    return Err(Error::InvalidArgument("CNOT control equals target".into()));
                }
                Ok(Self::permutation(|i| {
                    if bit(i, control, 4) == 1 {
                        match target {
                            Qubit::Electron => i ^ 2,
                            Qubit::Nuclear => i ^ 1,
                        }
                    } else {
                        i
                    }
                }))
            }
            GateOp::Swap => {
                if dim != 4 {
                    return Err(Error::DimensionMismatch { expected: 4, actual: dim });
                }
                Ok(Self::permutation(|i| ((i & 1) << 1) | (i >> 1)))
            }
        }
    }
}

/// Electron dephasing law during free evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    /// Coherence decays as `e^{−t/T2}`.
    Markovian { t2: f64 },
    /// Coherence decays as `e^{−(t/T2)²}` (slow, low-frequency noise).
    QuasiStatic { t2: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::Markovian { t2 } | NoiseModel::QuasiStatic { t2 } => {
                if t2.is_finite() && t2 > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!("T2 must be positive, got {t2}")))
                }
            }
        }
    }

    /// Multiplier applied to electron coherences after free evolution `t`.
    pub fn coherence_factor(&self, t: f64) -> f64 {
        match *self {
            NoiseModel::None => 1.0,
            NoiseModel::Markovian { t2 } => (-t / t2).exp(),
            NoiseModel::QuasiStatic { t2 } => (-(t / t2).powi(2)).exp(),
        }
    }

    /// Standard deviation `√2/T2` of the quasi-static detuning, chosen so that
    /// `⟨e^{−iδt}⟩ = e^{−(t/T2)²}`.
    pub fn quasi_static_sigma(t2: f64) -> f64 {
        std::f64::consts::SQRT_2 / t2
    }
}

/// Depolarizing strength attached to each two-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GateNoise(f64);

impl GateNoise {
    pub fn new(epsilon: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&epsilon) {
            Ok(Self(epsilon))
        } else {
            Err(Error::InvalidArgument(format!("gate error must be in [0, 1], got {epsilon}")))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim || (dim != 2 && dim != 4) {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be 2x2 or 4x4, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let rho = Self { m };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = v.unscale(norm);
        Self::from_matrix(&v * v.adjoint())
    }

    /// `|0…0⟩⟨0…0|`.
    pub fn ground(dim: usize) -> Result<Self> {
        let mut amps = vec![ZERO; dim];
        if let Some(a) = amps.first_mut() {
            *a = ONE;
        }
        Self::from_pure(&amps)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::from_matrix(linalg::identity(dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigen(&self.m).0[0]
    }

    pub fn check_invariants(&self) -> Result<()> {
        let herm = linalg::hermiticity_defect(&self.m);
        if herm > 1e-12 {
            return Err(Error::InvalidArgument(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-10 {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `U ρ U†`.
    pub fn apply_gate(&self, gate: &GateOp) -> Result<Self> {
        let u = gate.unitary(self.dim())?;
        Ok(Self { m: &u * &self.m * u.adjoint() })
    }

    /// Ideal free evolution: phase `e^{−iωt}` on `|1⟩_e`.
    pub fn apply_phase(&self, omega: f64, t: f64) -> Self {
        let dim = self.dim();
        let mut m = self.m.clone();
        for i in 0..dim {
            for j in 0..dim {
                let de = bit(i, Qubit::Electron, dim) as f64 - bit(j, Qubit::Electron, dim) as f64;
                if de != 0.0 {
                    m[(i, j)] *= Complex64::from_polar(1.0, -de * omega * t);
                }
            }
        }
        Self { m }
    }

    /// Scales every element that is coherent between `|0⟩_e` and `|1⟩_e` by the
    /// noise model's decay factor for time `t`. Populations are untouched.
    pub fn apply_dephasing(&self, noise: &NoiseModel, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("dephasing time must be >= 0, got {t}")));
        }
        noise.validate()?;
        let f = noise.coherence_factor(t);
        let dim = self.dim();
        let mut m = self.m.clone();
        for i in 0..dim {
            for j in 0..dim {
                if bit(i, Qubit::Electron, dim) != bit(j, Qubit::Electron, dim) {
                    m[(i, j)] *= f;
                }
            }
        }
        Ok(Self { m })
    }

    /// `(1−ε)ρ + ε I/4`.
    pub fn apply_depolarizing(&self, noise: GateNoise) -> Result<Self> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, actual: self.dim() });
        }
        let eps = noise.epsilon();
        Ok(Self { m: self.m.scale(1.0 - eps) + linalg::identity(4).scale(eps / 4.0) })
    }

    /// Born-rule probabilities `(p0, p1)` for measuring `qubit`.
    ///
    /// For [`Basis::Y`] the pair is `(P(|0_y⟩), P(|1_y⟩))` with
    /// `|1_y⟩ = (|0⟩ + i|1⟩)/√2`, so `p1` is the probability of `σ_y = +1`. The
    /// measurement is realised as `RotX(π/2)` followed by a Z projection, which
    /// sends `|1_y⟩` to `|0⟩`.
    pub fn measure_basis(&self, qubit: Qubit, basis: Basis) -> Result<(f64, f64)> {
        qubit.check(self.dim())?;
        let rotated;
        let rho = match basis {
            Basis::Z => self,
            Basis::Y => {
                rotated = self.apply_gate(&GateOp::RotX {
                    qubit,
                    angle: std::f64::consts::FRAC_PI_2,
                })?;
                &rotated
            }
        };
        let dim = rho.dim();
        let p1_z: f64 = (0..dim)
            .filter(|&i| bit(i, qubit, dim) == 1)
            .map(|i| rho.m[(i, i)].re)
            .sum();
        let p1_z = p1_z.clamp(0.0, 1.0);
        Ok(match basis {
            Basis::Z => (1.0 - p1_z, p1_z),
            Basis::Y => (p1_z, 1.0 - p1_z),
        })
    }

    /// Reduced single-qubit state of `keep`.
    pub fn partial_trace(&self, keep: Qubit) -> Result<Self> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, actual: self.dim() });
        }
        let mut out = CMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                out[(a, b)] = (0..2)
                    .map(|k| {
                        let (i, j) = match keep {
                            Qubit::Electron => (2 * a + k, 2 * b + k),
                            Qubit::Nuclear => (2 * k + a, 2 * k + b),
                        };
                        self.m[(i, j)]
                    })
                    .sum();
            }
        }
        Ok(Self { m: out })
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<Self> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, actual: self.dim().max(other.dim()) });
        }
        Ok(Self { m: linalg::kron(&self.m, &other.m) })
    }
}

/// Serialized as a row-major array of `[re, im]` pairs.
impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .m
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// Pure two-qubit (or one-qubit) state for Monte Carlo trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = DVector::from_element(dim, ZERO);
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        let u = gate.unitary(self.dim())?;
        self.amps = u * &self.amps;
        Ok(())
    }

    pub fn apply_unitary(&mut self, u: &CMatrix) {
        self.amps = u * &self.amps;
    }

    /// Probability of reading bit 1 on `qubit` in the Z basis.
    pub fn z_probability_one(&self, qubit: Qubit) -> f64 {
        let dim = self.dim();
        let p: f64 = (0..dim)
            .filter(|&i| bit(i, qubit, dim) == 1)
            .map(|i| self.amps[i].norm_sqr())
            .sum();
        (p / self.amps.norm_squared()).clamp(0.0, 1.0)
    }

    /// `|1⟩_e ↦ e^{−iφ}|1⟩_e`.
    pub fn apply_phase(&mut self, phase: f64) {
        let dim = self.dim();
        let rot = Complex64::from_polar(1.0, -phase);
        for i in 0..dim {
            if bit(i, Qubit::Electron, dim) == 1 {
                self.amps[i] *= rot;
            }
        }
    }

    /// Electron `σ_z` (phase flip).
    pub fn apply_phase_flip(&mut self) {
        let dim = self.dim();
        for i in 0..dim {
            if bit(i, Qubit::Electron, dim) == 1 {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self.amps.as_slice())
    }
}

/// Draws a quasi-static detuning `δ ~ Normal(0, √2/T2)`.
pub fn sample_quasi_static_detuning<R: Rng + ?Sized>(rng: &mut R, t2: f64) -> f64 {
    Normal::new(0.0, NoiseModel::quasi_static_sigma(t2))
        .expect("sigma is finite and positive")
        .sample(rng)
}
