//! Simulation and analysis of an electron/nuclear-spin NV magnetometer that
//! stores the sensing phase in the nuclear spin between short electron
//! exposures.
//!
//! * [`hamiltonian`]: full spin-1 ⊗ spin-½ model and its two-qubit reduction.
//! * [`spin`]: two-qubit density matrices, gates, dephasing and depolarizing channels.
//! * [`protocol`]: the Ramsey and hybrid sequences, exact and Monte Carlo.
//! * [`analytics`]: closed-form uncertainties, error probabilities, time budget.
//! * [`estimation`]: sampled estimates of `ω` and their spread.
//! * [`optimizer`]: optimum `(N, α)` per gate error and the sweep over it.

pub mod analytics;
pub mod error;
pub mod estimation;
pub mod hamiltonian;
pub mod linalg;
pub mod optimizer;
pub mod protocol;
pub mod report;
pub mod spin;

pub use analytics::{ComparisonMode, SensitivityReport, TimeBudget, Timing};
pub use error::{Error, Result};
pub use estimation::{EstimationRun, Sampling, Scheme, SweepRow};
pub use hamiltonian::{HamiltonianMatrix, PhysicalConstants, ReductionReport};
pub use optimizer::OptimizationResult;
pub use protocol::{EmpiricalOutcome, ProtocolOutcome, PulseOp, PulseSequence, PulseStep, SensorParams};
pub use spin::{Basis, DensityMatrix, GateNoise, GateOp, NoiseModel, Qubit, StateVector};
