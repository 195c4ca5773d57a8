//! NV-centre spin Hamiltonians: the full electron spin-1 ⊗ nuclear spin-½
//! model, its two-qubit effective reduction, and the rotating-frame model
//! the sensing protocol runs in.
//!
//! Full-space basis (dimension 6, electron is the slow index):
//! `|m_S=+1⟩, |0⟩, |−1⟩ ⊗ |σ_z=+1⟩, |σ_z=−1⟩`.
//!
//! Two-qubit basis (dimension 4, index `2e + n`): `|1⟩_e` is `m_S = +1`,
//! `|0⟩_e` is `m_S = 0`; `|1⟩_n` is the nuclear `σ_z = +1` state and
//! `|0⟩_n` is `σ_z = −1`. With this labelling `|11⟩` has rotating-frame energy
//! `ω = g_e μ_B B + A`.
//!
//! All entries are angular frequencies (rad/s); fields are in tesla and
//! `mu_b` converts tesla to rad/s.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Spectral, ONE, ZERO};

pub const DEFAULT_VALIDITY_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Zero-field splitting (rad/s).
    pub d: f64,
    pub g_e: f64,
    /// Nuclear g-factor in units of the Bohr magneton.
    pub g_n: f64,
    /// Bohr magneton over hbar (rad s⁻¹ T⁻¹).
    pub mu_b: f64,
    /// Parallel hyperfine coupling (rad/s).
    pub a: f64,
    /// Flip-flop hyperfine coupling A′ (rad/s).
    pub a_perp: f64,
    /// External bias field (T).
    pub b_ex: f64,
    /// Target field (T).
    pub b: f64,
    /// Required detuning ratio for the effective model to count as valid.
    pub validity_factor: f64,
}

impl Default for PhysicalConstants {
    /// Conventional ¹⁴N NV values at a 10 mT bias.
    fn default() -> Self {
        let two_pi = std::f64::consts::TAU;
        Self {
            d: two_pi * 2.87e9,
            g_e: 2.003,
            g_n: 2.199e-4,
            mu_b: 8.794_100_7e10,
            a: -two_pi * 2.16e6,
            a_perp: -two_pi * 2.7e6,
            b_ex: 0.01,
            b: 1e-6,
            validity_factor: DEFAULT_VALIDITY_FACTOR,
        }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("d", self.d),
            ("g_e", self.g_e),
            ("g_n", self.g_n),
            ("mu_b", self.mu_b),
            ("a", self.a),
            ("a_perp", self.a_perp),
            ("b_ex", self.b_ex),
            ("b", self.b),
            ("validity_factor", self.validity_factor),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidConstants(format!("{name} is not finite ({v})")));
        }
        if self.d <= 0.0 {
            return Err(Error::InvalidConstants(format!("d must be positive, got {}", self.d)));
        }
        Ok(())
    }

    /// `g_e μ_B B_ex`.
    pub fn electron_zeeman(&self) -> f64 {
        self.g_e * self.mu_b * self.b_ex
    }

    /// `g_e μ_B B`.
    pub fn target_shift(&self) -> f64 {
        self.g_e * self.mu_b * self.b
    }

    /// Resonant frequency of `|11⟩` in the rotating frame.
    pub fn omega(&self) -> f64 {
        self.target_shift() + self.a
    }

    /// Diagonal energy of the full-space state `(m_S, σ_z)`.
    fn level(&self, m: f64, s: f64) -> f64 {
        let field = self.b_ex + self.b;
        self.d * m * m
            + self.g_e * self.mu_b * field * m
            + self.a * m * s
            + self.g_n * self.mu_b * field * s
    }

    /// Energy gaps bridged by the two flip-flop couplings:
    /// `|0,↑⟩ ↔ |+1,↓⟩` (stays in the qubit space) and
    /// `|0,↓⟩ ↔ |−1,↑⟩` (leaks out of it).
    pub fn flip_flop_gaps(&self) -> (f64, f64) {
        (
            (self.level(1.0, -1.0) - self.level(0.0, 1.0)).abs(),
            (self.level(-1.0, 1.0) - self.level(0.0, -1.0)).abs(),
        )
    }

    /// Smallest energy scale protecting the two-qubit reduction.
    pub fn detuning(&self) -> f64 {
        let (g1, g2) = self.flip_flop_gaps();
        self.electron_zeeman().abs().min(g1).min(g2)
    }

    /// `detuning / max(|A|, |A′|)`; infinite when both couplings vanish.
    pub fn detuning_ratio(&self) -> f64 {
        let coupling = self.a.abs().max(self.a_perp.abs());
        if coupling == 0.0 {
            f64::INFINITY
        } else {
            self.detuning() / coupling
        }
    }

    pub fn effective_model_valid(&self) -> bool {
        self.detuning_ratio() >= self.validity_factor
    }

    fn require_effective_valid(&self) -> Result<()> {
        self.validate()?;
        if !self.effective_model_valid() {
            return Err(Error::EffectiveModelInvalid {
                ratio: self.detuning_ratio(),
                required: self.validity_factor,
            });
        }
        Ok(())
    }
}

/// A Hermitian Hamiltonian in rad/s, either on the 6-level space or on the
/// two-qubit space.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: CMatrix,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        let scale = linalg::max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        linalg::hermiticity_defect(&self.matrix) <= 1e-12 * scale
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.matrix).0
    }

    pub fn spectral(&self) -> Spectral {
        Spectral::new(&self.matrix)
    }

    /// `exp(−i H t)` via exact eigendecomposition.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.spectral().propagator(t)
    }
}

fn spin1_ops() -> (CMatrix, CMatrix, CMatrix) {
    let sz = linalg::diag_real(&[1.0, 0.0, -1.0]);
    let r2 = Complex64::new(std::f64::consts::SQRT_2, 0.0);
    // S+ |m⟩ = sqrt(2) |m+1⟩ for spin 1, basis order +1, 0, −1
    let sp = CMatrix::from_row_slice(3, 3, &[ZERO, r2, ZERO, ZERO, ZERO, r2, ZERO, ZERO, ZERO]);
    let sm = sp.adjoint();
    (sz, sp, sm)
}

fn pauli_ops() -> (CMatrix, CMatrix, CMatrix) {
    let sz = linalg::diag_real(&[1.0, -1.0]);
    // σ+ = |↑⟩⟨↓|, basis order ↑, ↓
    let sp = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let sm = sp.adjoint();
    (sz, sp, sm)
}

/// Full electron spin-1 ⊗ nuclear spin-½ Hamiltonian:
/// `D S_z² + g_e μ_B (B_ex+B) S_z + A S_z σ_z + (A′/2)(S₊σ₋ + S₋σ₊)
/// + g_n μ_B (B_ex+B) σ_z`.
pub fn build_full_hamiltonian(c: &PhysicalConstants) -> Result<HamiltonianMatrix> {
    c.validate()?;
    let (sz, sp, sm) = spin1_ops();
    let (nz, np, nm) = pauli_ops();
    let i3 = linalg::identity(3);
    let i2 = linalg::identity(2);
    let field = c.b_ex + c.b;
    let re = |x: f64| Complex64::new(x, 0.0);

    let matrix = linalg::kron(&(&sz * &sz), &i2) * re(c.d)
        + linalg::kron(&sz, &i2) * re(c.g_e * c.mu_b * field)
        + linalg::kron(&sz, &nz) * re(c.a)
        + (linalg::kron(&sp, &nm) + linalg::kron(&sm, &np)) * re(0.5 * c.a_perp)
        + linalg::kron(&i3, &nz) * re(c.g_n * c.mu_b * field);
    Ok(HamiltonianMatrix { matrix })
}

/// Nuclear `σ_z` eigenvalue of qubit label `n` (see module docs).
fn nuclear_sign(n: usize) -> f64 {
    if n == 1 {
        1.0
    } else {
        -1.0
    }
}

fn qubit_diagonal(f: impl Fn(usize, usize) -> f64) -> CMatrix {
    let values: Vec<f64> = (0..4).map(|i| f(i / 2, i % 2)).collect();
    linalg::diag_real(&values)
}

/// Full-space index of the two-qubit basis state `|e n⟩`.
pub fn qubit_to_full_index(e: usize, n: usize) -> usize {
    2 * (1 - e) + (1 - n)
}

fn effective_unchecked(c: &PhysicalConstants) -> CMatrix {
    let electron = c.d + c.g_e * c.mu_b * (c.b_ex + c.b);
    let nuclear = c.g_n * c.mu_b * c.b_ex;
    qubit_diagonal(|e, n| {
        let s = nuclear_sign(n);
        e as f64 * (electron + c.a * s) + nuclear * s
    })
}

fn rotating_unchecked(c: &PhysicalConstants) -> CMatrix {
    qubit_diagonal(|e, n| e as f64 * (c.target_shift() + c.a * nuclear_sign(n)))
}

/// Generator of the frame change: `(D + g_e μ_B B_ex)|1⟩⟨1| + g_n μ_B B_ex σ_z`.
fn frame_generator(c: &PhysicalConstants) -> CMatrix {
    let electron = c.d + c.electron_zeeman();
    let nuclear = c.g_n * c.mu_b * c.b_ex;
    qubit_diagonal(|e, n| e as f64 * electron + nuclear * nuclear_sign(n))
}

/// Two-qubit effective Hamiltonian with `|−1⟩_e` projected out and
/// flip-flops dropped.
pub fn build_effective_hamiltonian(c: &PhysicalConstants) -> Result<HamiltonianMatrix> {
    c.require_effective_valid()?;
    Ok(HamiltonianMatrix { matrix: effective_unchecked(c) })
}

/// `g_e μ_B B |1⟩⟨1| + A |1⟩⟨1| ⊗ σ_z`: the effective model seen from the
/// frame rotating with the bias-field and zero-field terms.
pub fn rotating_frame_hamiltonian(c: &PhysicalConstants) -> Result<HamiltonianMatrix> {
    c.require_effective_valid()?;
    Ok(HamiltonianMatrix { matrix: rotating_unchecked(c) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub trace_distance_max: f64,
    pub leakage_max: f64,
    pub detuning_ratio: f64,
    pub valid: bool,
}

/// Compares the full 6-level dynamics against the rotating-frame two-qubit
/// model on `t ∈ [0, t_max]` (`steps + 1` grid points), starting from
/// `|+⟩_e ⊗ |+⟩_n`.
///
/// The full-space state is restricted to the `{m_S = 0, +1}` block (not
/// renormalised) and moved into the rotating frame before comparing. The
/// nuclear Zeeman shift from the target field `B` is absent from the reduced
/// model, so it contributes to the reported distance.
pub fn validate_reduction(
    c: &PhysicalConstants,
    t_max: f64,
    steps: usize,
) -> Result<ReductionReport> {
    c.validate()?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be finite and >= 0, got {t_max}")));
    }

    let full = Spectral::new(&build_full_hamiltonian(c)?.matrix);
    let reduced = Spectral::new(&rotating_unchecked(c));
    let frame = Spectral::new(&frame_generator(c));

    let amp = Complex64::new(0.5, 0.0);
    let psi_qubit = nalgebra::DVector::from_element(4, amp);
    let mut psi_full = nalgebra::DVector::from_element(6, ZERO);
    for e in 0..2 {
        for n in 0..2 {
            psi_full[qubit_to_full_index(e, n)] = psi_qubit[2 * e + n];
        }
    }

    let mut trace_distance_max = 0.0_f64;
    let mut leakage_max = 0.0_f64;
    for k in 0..=steps {
        let t = t_max * k as f64 / steps as f64;
        let full_t = full.propagator(t) * &psi_full;
        let leak = full_t[4].norm_sqr() + full_t[5].norm_sqr();
        leakage_max = leakage_max.max(leak);

        let block = nalgebra::DVector::from_iterator(
            4,
            (0..4).map(|i| full_t[qubit_to_full_index(i / 2, i % 2)]),
        );
        // undo the frame: |ψ_rot⟩ = exp(+i H0 t) |ψ⟩
        let rotated = frame.propagator(-t) * block;
        let model = reduced.propagator(t) * &psi_qubit;

        let rho_full = &rotated * rotated.adjoint();
        let rho_model = &model * model.adjoint();
        trace_distance_max = trace_distance_max.max(linalg::trace_distance(&rho_full, &rho_model));
    }

    Ok(ReductionReport {
        trace_distance_max,
        leakage_max,
        detuning_ratio: c.detuning_ratio(),
        valid: c.effective_model_valid(),
    })
}
