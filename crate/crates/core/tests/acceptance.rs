//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p nvsensor-core --test acceptance`.

use std::f64::consts::{E, FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nvsensor_core::analytics::{
    conventional_uncertainty_opt, hybrid_uncertainty_small_phase, markovian_uncertainty, time_budget,
    Timing,
};
use nvsensor_core::estimation::{run_estimation, EstimationRun};
use nvsensor_core::hamiltonian::validate_reduction;
use nvsensor_core::optimizer::{breakeven_epsilon, golden_section_max, optimize_r, DEFAULT_N_MAX};
use nvsensor_core::protocol::{run_conventional_trajectories, run_hybrid_exact};
use nvsensor_core::{NoiseModel, PhysicalConstants, SensorParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion(id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let (pass, detail) = match result {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over time limit")),
        Err(d) => (false, d),
    };
    println!(
        "[{}] {id}. {name}: {detail} ({:.3} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn alpha_optimum() -> Check {
    let mut worst = 0.0f64;
    for n in [1u32, 4, 16, 250] {
        let f = |alpha: f64| {
            -hybrid_uncertainty_small_phase(&SensorParams::new(1.0, 0.0, n, alpha, 1)).unwrap()
        };
        let (alpha, _) = golden_section_max(f, 0.01, 5.0, 1e-10);
        worst = worst.max((alpha - FRAC_1_SQRT_2).abs());
    }
    ensure(worst < 1e-6, format!("max |alpha - 1/sqrt2| = {worst:.2e} (tol 1e-6)"))
}

fn sqrt_n_gain() -> Check {
    let (t2e, m) = (2.5e-6, 100u64);
    let (mut worst_formula, mut worst_ratio) = (0.0f64, 0.0f64);
    for k in 0..=10 {
        let n = 1u32 << k;
        let d = hybrid_uncertainty_small_phase(&SensorParams::new(t2e, 0.0, n, FRAC_1_SQRT_2, m)).unwrap();
        let expected = SQRT_2 * 0.5f64.exp() / ((m as f64 * n as f64).sqrt() * t2e);
        worst_formula = worst_formula.max((d / expected - 1.0).abs());
        let ratio = conventional_uncertainty_opt(t2e, m) / d;
        worst_ratio = worst_ratio.max((ratio / (n as f64).sqrt() - 1.0).abs());
    }
    ensure(
        worst_formula < 1e-12 && worst_ratio < 1e-12,
        format!("formula rel err {worst_formula:.1e}, ratio/sqrtN rel err {worst_ratio:.1e} (tol 1e-12)"),
    )
}

fn markovian_no_gain() -> Check {
    let (t2e, m) = (1e-6, 50u64);
    let minima: Vec<f64> = [1u32, 4, 16, 64, 256, 1024]
        .iter()
        .map(|&n| -golden_section_max(|a| -markovian_uncertainty(a, n, t2e, m), 1e-4, 10.0, 1e-12).1)
        .collect();
    let lo = minima.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = minima.iter().cloned().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    // Ramsey under the same exponential law: min_t e^{t/T2}/(sqrt(M) t)
    let conv = -golden_section_max(
        |t: f64| -(t / t2e).exp() / ((m as f64).sqrt() * t),
        1e-3 * t2e,
        10.0 * t2e,
        1e-12 * t2e,
    )
    .1;
    let vs_conv = (lo / conv - 1.0).abs();
    let vs_closed = (lo / (E / ((m as f64).sqrt() * t2e)) - 1.0).abs();
    ensure(
        spread < 1e-9 && vs_conv < 1e-9,
        format!(
            "spread over N {spread:.1e}, vs Markovian Ramsey optimum {vs_conv:.1e}, vs e/(sqrtM T2e) {vs_closed:.1e} (tol 1e-9)"
        ),
    )
}

fn engine_equivalence() -> Check {
    let mut worst = 0.0f64;
    let mut worst_p = 0.0f64;
    let t2e = 1.0;
    for n in [1u32, 4, 16] {
        for alpha in [0.3, FRAC_1_SQRT_2, 1.2] {
            for eps in [0.0, 0.01, 0.1] {
                for wt in [0.0, 0.05, 0.2] {
                    let p = SensorParams::new(t2e, wt / t2e, n, alpha, 1).with_epsilon(eps);
                    let out = run_hybrid_exact(&p).map_err(|e| e.to_string())?;
                    let keep = (1.0 - eps).powi(2 * n as i32 + 1);
                    let phase = alpha * (n as f64).sqrt() * wt;
                    let coh = Complex64::from_polar(0.5 * keep * (-alpha * alpha).exp(), phase);
                    // electron ⊗ |0⟩⟨0|_n occupies indices 0 and 2
                    let mut expected = nalgebra::DMatrix::<Complex64>::identity(4, 4)
                        .scale((1.0 - keep) / 4.0);
                    expected[(0, 0)] += 0.5 * keep;
                    expected[(2, 2)] += 0.5 * keep;
                    expected[(0, 2)] += coh;
                    expected[(2, 0)] += coh.conj();
                    let diff = (out.final_state.matrix() - &expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
                    worst = worst.max(diff);
                    let p_closed = 0.5 - 0.5 * keep * (-alpha * alpha).exp() * phase.sin();
                    worst_p = worst_p.max((out.p_click - p_closed).abs());
                }
            }
        }
    }
    ensure(
        worst < 1e-10 && worst_p < 1e-10,
        format!("81 points, max |rho - closed form| = {worst:.1e}, max |p - closed form| = {worst_p:.1e} (tol 1e-10)"),
    )
}

fn figure3_landmarks() -> Check {
    let r = optimize_r(0.001, DEFAULT_N_MAX).map_err(|e| e.to_string())?;
    let b = breakeven_epsilon(DEFAULT_N_MAX).map_err(|e| e.to_string())?;
    ensure(
        (9.0..=10.5).contains(&r.r_star) && (0.070..=0.080).contains(&b),
        format!("r*(0.001) = {:.4} at N* = {}, break-even eps = {b:.5}", r.r_star, r.n_star),
    )
}

fn monte_carlo_eq7() -> Check {
    let params = SensorParams::new(1.0, 0.01, 16, FRAC_1_SQRT_2, 10_000);
    let run = run_estimation(EstimationRun::new(params, 1000, 20_240_601)).map_err(|e| e.to_string())?;
    let ratio = run.empirical_std / run.analytic_std;
    ensure(
        (0.9..=1.1).contains(&ratio),
        format!(
            "empirical {:.5e}, analytic {:.5e}, ratio {ratio:.4} (band 0.9..1.1), clamped {}",
            run.empirical_std, run.analytic_std, run.clamp_count
        ),
    )
}

fn trajectory_agreement() -> Check {
    let shots = 100_000u64;
    let mut details = Vec::new();
    let mut ok = true;
    for (i, k) in [0.25f64, 0.5, 1.0].into_iter().enumerate() {
        let t2 = 1.0;
        let t = k * t2;
        // ωt = π/2 puts the full coherence factor into the click probability
        let p = SensorParams::new(t2, FRAC_PI_2 / t, 1, 1.0, 1).with_noise(NoiseModel::QuasiStatic { t2 });
        let emp = run_conventional_trajectories(&p, t, shots, 7 + i as u64).map_err(|e| e.to_string())?;
        let coherence = (-k * k).exp();
        let p_exact = 0.5 - 0.5 * coherence;
        let se = (p_exact * (1.0 - p_exact) / shots as f64).sqrt();
        let z = (emp.p_click - p_exact) / se;
        ok &= z.abs() < 3.0;
        details.push(format!("t/T2={k}: z={z:+.2}"));
    }
    ensure(ok, format!("{} (|z| < 3)", details.join(", ")))
}

fn hamiltonian_reduction() -> Check {
    let base = PhysicalConstants { b: 0.0, ..PhysicalConstants::default() };
    let gamma = base.g_e * base.mu_b;
    let coupling = base.a.abs().max(base.a_perp.abs());
    let low = PhysicalConstants { b_ex: 100.0 * coupling / gamma, ..base };
    let t_max = 10.0 / low.a.abs();
    let rep = validate_reduction(&low, t_max, 400).map_err(|e| e.to_string())?;
    let ratio_ok = (rep.detuning_ratio - 100.0).abs() < 1e-6;
    let bound_ok = rep.trace_distance_max < 1e-2;

    // doubling the bias field above the level anti-crossing, for randomly drawn couplings
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut monotone = true;
    let cases = 12;
    for _ in 0..cases {
        let c = PhysicalConstants {
            a: base.a * rng.random_range(0.5..2.0),
            a_perp: base.a_perp * rng.random_range(0.5..2.0),
            ..base
        };
        let b0 = rng.random_range(2.0..3.0) * c.d / gamma;
        let t_max = 10.0 / c.a.abs();
        let mut last = f64::INFINITY;
        for k in [1.0, 2.0, 4.0, 8.0] {
            let td = validate_reduction(&PhysicalConstants { b_ex: b0 * k, ..c }, t_max, 200)
                .map_err(|e| e.to_string())?
                .trace_distance_max;
            monotone &= td < last;
            last = td;
        }
    }
    ensure(
        ratio_ok && bound_ok && monotone,
        format!(
            "ratio {:.1}: max trace distance {:.2e} over t <= 10/|A| (tol 1e-2); strictly decreasing under bias doubling in {cases} random cases: {monotone}",
            rep.detuning_ratio, rep.trace_distance_max
        ),
    )
}

fn time_budget_check() -> Check {
    let p = SensorParams::new(0.3e-6, 0.0, 100, FRAC_1_SQRT_2, 1);
    let timing = Timing { tau_p: 2e-6, tau_w: 25e-6, tau_m: 2e-6 };
    let b = time_budget(&p, &timing, false).map_err(|e| e.to_string())?;
    let conv = timing.tau_p + p.t2e / SQRT_2 + timing.tau_m;
    let rel = (b.t_cycle_conv / conv - 1.0).abs();
    ensure(
        b.t_cycle_hybrid == 2.5e-3 && rel <= 1e-15,
        format!("t_cycle_hybrid = {:e} s, t_cycle_conv = {:e} s (rel err {rel:.1e})", b.t_cycle_hybrid, b.t_cycle_conv),
    )
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "alpha optimum", s(1), alpha_optimum),
        criterion(2, "sqrt(N) gain", s(1), sqrt_n_gain),
        criterion(3, "Markovian no-gain", s(1), markovian_no_gain),
        criterion(4, "engine vs closed form", s(10), engine_equivalence),
        criterion(5, "gate-error landmarks", s(5), figure3_landmarks),
        criterion(6, "Monte Carlo uncertainty", s(60), monte_carlo_eq7),
        criterion(7, "trajectory vs channel", s(30), trajectory_agreement),
        criterion(8, "Hamiltonian reduction", s(5), hamiltonian_reduction),
        criterion(9, "time budget", s(1), time_budget_check),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
