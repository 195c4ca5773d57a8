//! Shared fixtures for the criterion benches.

use std::f64::consts::FRAC_1_SQRT_2;

use nvsensor_core::{NoiseModel, PhysicalConstants, SensorParams};

/// Quasi-static dephasing at `T2e = 1 µs`, optimal α, 1% gate error.
pub fn sensor(n_transfers: u32) -> SensorParams {
    SensorParams::new(1e-6, 1e4, n_transfers, FRAC_1_SQRT_2, 10_000)
        .with_epsilon(0.01)
        .with_noise(NoiseModel::QuasiStatic { t2: 1e-6 })
}

/// NV constants with the bias set for a detuning ratio of 100.
pub fn constants_ratio_100() -> PhysicalConstants {
    let base = PhysicalConstants { b: 0.0, ..PhysicalConstants::default() };
    let coupling = base.a.abs().max(base.a_perp.abs());
    PhysicalConstants { b_ex: 100.0 * coupling / (base.g_e * base.mu_b), ..base }
}
