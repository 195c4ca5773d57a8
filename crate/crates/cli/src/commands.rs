use std::path::Path;

use nvsensor_core::analytics::{sensitivity_report, time_budget, ComparisonMode, SensitivityReport, TimeBudget};
use nvsensor_core::estimation::{run_estimation, sweep_n, EstimationRun};
use nvsensor_core::hamiltonian::validate_reduction;
use nvsensor_core::optimizer::{breakeven_epsilon, default_epsilon_grid, figure3_sweep};
use nvsensor_core::protocol::{run_conventional, run_hybrid_exact, run_hybrid_trajectories, transcript};
use nvsensor_core::report::{fmt_f64, write_figure3_csv, write_sweep_csv};
use nvsensor_core::{EmpiricalOutcome, OptimizationResult, ProtocolOutcome, SensorParams};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::{plot, Cli, CliError, Command};

/// One output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
    /// Printed to stdout when no output directory is configured.
    pub primary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// 0 or 1; 1 when the command ran but the result is out of regime.
    pub exit_code: u8,
    /// Short status line for stderr.
    pub summary: String,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_to_string(write: impl FnOnce(&mut Vec<u8>) -> nvsensor_core::Result<()>) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Config(e.to_string()))
}

fn artifact(file_name: &str, contents: String) -> Artifact {
    Artifact { file_name: file_name.to_string(), contents, primary: true }
}

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Config(format!("{command} does not support --format {format:?}").to_lowercase())
}

fn require_effective_model(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.constants.validate()?;
    if !cfg.constants.effective_model_valid() {
        return Err(CliError::Regime(format!(
            "two-qubit model invalid: detuning ratio {:.3} below {} (run validate-model for details)",
            cfg.constants.detuning_ratio(),
            cfg.constants.validity_factor
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.resolve_config()?;
    let outcome = match cli.command {
        Command::ValidateModel => validate_model(&cfg)?,
        Command::Simulate => simulate(&cfg)?,
        Command::SweepN => sweep(&cfg)?,
        Command::Figure3 => figure3(&cfg)?,
        Command::TimeBudget => budget(&cfg)?,
        Command::Transcript => listing(&cfg)?,
    };
    Ok(outcome)
}

/// Writes artifacts into `dir` (created if missing) or returns the primary
/// artifacts' text for stdout.
pub fn emit(outcome: &Outcome, dir: Option<&Path>) -> Result<String, CliError> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
            let mut listing = String::new();
            for a in &outcome.artifacts {
                let path = dir.join(&a.file_name);
                std::fs::write(&path, &a.contents)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
                listing.push_str(&format!("wrote {}\n", path.display()));
            }
            Ok(listing)
        }
        None => Ok(outcome
            .artifacts
            .iter()
            .filter(|a| a.primary)
            .map(|a| a.contents.as_str())
            .collect()),
    }
}

fn validate_model(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(Format::Json);
    if format != Format::Json {
        return Err(unsupported("validate-model", format));
    }
    let c = &cfg.constants;
    c.validate()?;
    let t_max = match cfg.run.validate_t_max {
        Some(t) => t,
        None => {
            let coupling = c.a.abs().max(c.a_perp.abs());
            if coupling == 0.0 {
                return Err(CliError::Config("set run.validate_t_max when both hyperfine couplings are zero".into()));
            }
            10.0 / coupling
        }
    };
    let report = validate_reduction(c, t_max, cfg.run.validate_steps)?;
    let summary = format!(
        "detuning ratio {:.3}, max trace distance {:.3e}: {}",
        report.detuning_ratio,
        report.trace_distance_max,
        if report.valid { "valid" } else { "invalid" }
    );
    Ok(Outcome {
        artifacts: vec![artifact("reduction.json", to_json(&report)?)],
        exit_code: if report.valid { 0 } else { 1 },
        summary,
    })
}

#[derive(Serialize)]
struct SimulationReport {
    seed: u64,
    params: SensorParams,
    exact: ProtocolOutcome,
    /// Ramsey at the same total exposure `α·T2e`.
    conventional: ProtocolOutcome,
    trajectories: EmpiricalOutcome,
    /// `(empirical − exact) / binomial standard error`.
    trajectory_z: f64,
    sensitivity: SensitivityReport,
    estimation: EstimationRun,
}

/// Seed offset for the estimation stage so its per-repetition streams do
/// not coincide with the trajectory stream.
const ESTIMATION_SEED_MASK: u64 = 1 << 63;

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(Format::Json);
    if format != Format::Json {
        return Err(unsupported("simulate", format));
    }
    let seed = cfg.require_seed()?;
    let params = cfg.sensor_params()?;
    require_effective_model(cfg)?;
    if params.phase_wrapped() {
        return Err(CliError::Regime(format!(
            "accumulated phase {:.4} rad is outside (-pi/2, pi/2); reduce omega, alpha or N",
            params.total_phase()
        )));
    }
    let exact = run_hybrid_exact(&params)?;
    let conventional = run_conventional(&params, params.alpha * params.t2e)?;
    let trajectories = run_hybrid_trajectories(&params, cfg.run.shots, seed)?;
    let p = exact.p_click;
    let se = (p * (1.0 - p) / cfg.run.shots as f64).sqrt();
    let trajectory_z = if se > 0.0 { (trajectories.p_click - p) / se } else { 0.0 };
    let sensitivity = sensitivity_report(&params, ComparisonMode::FixedShots, false)?;
    let estimation = run_estimation(
        EstimationRun::new(params, cfg.run.repetitions, seed ^ ESTIMATION_SEED_MASK).with_sampling(cfg.run.sampling),
    )?;
    let summary = format!(
        "p_click exact {:.6} vs trajectories {:.6} (z = {:+.2}); std of estimates {:.4e} vs analytic {:.4e}{}",
        p,
        trajectories.p_click,
        trajectory_z,
        estimation.empirical_std,
        estimation.analytic_std,
        if estimation.flagged { " [clamp rate above 1%]" } else { "" }
    );
    let report = SimulationReport {
        seed,
        params,
        exact,
        conventional,
        trajectories,
        trajectory_z,
        sensitivity,
        estimation,
    };
    Ok(Outcome { artifacts: vec![artifact("simulation.json", to_json(&report)?)], exit_code: 0, summary })
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(Format::Csv);
    let params = cfg.sensor_params()?;
    require_effective_model(cfg)?;
    let reps = cfg.run.repetitions;
    let seed = if reps >= 2 { cfg.require_seed()? } else { cfg.seed.unwrap_or(0) };
    let rows = sweep_n(&params, &cfg.run.n_list, reps, seed)?;
    let art = match format {
        Format::Csv => artifact("sweep_n.csv", csv_to_string(|b| write_sweep_csv(b, &rows))?),
        Format::Json => artifact("sweep_n.json", to_json(&rows)?),
        Format::Svg => return Err(unsupported("sweep-n", format)),
    };
    let summary = format!("{} rows (baseline + {} values of N)", rows.len(), cfg.run.n_list.len());
    Ok(Outcome { artifacts: vec![art], exit_code: 0, summary })
}

#[derive(Serialize)]
struct Figure3Report {
    n_max: u32,
    breakeven_epsilon: f64,
    rows: Vec<OptimizationResult>,
}

fn figure3(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(Format::Csv);
    let grid = cfg.run.eps_grid.clone().unwrap_or_else(default_epsilon_grid);
    let n_max = cfg.run.n_max;
    let rows = figure3_sweep(&grid, n_max)?;
    let breakeven = breakeven_epsilon(n_max)?;
    let csv = csv_to_string(|b| write_figure3_csv(b, &rows))?;
    let artifacts = match format {
        Format::Csv => vec![artifact("figure3.csv", csv)],
        Format::Json => {
            let report = Figure3Report { n_max, breakeven_epsilon: breakeven, rows };
            vec![artifact("figure3.json", to_json(&report)?)]
        }
        Format::Svg => vec![
            Artifact { primary: false, ..artifact("figure3.csv", csv) },
            artifact("figure3.svg", plot::figure3_svg(&rows)),
        ],
    };
    Ok(Outcome {
        artifacts,
        exit_code: 0,
        summary: format!("{} grid points, break-even gate error {}", grid.len(), fmt_f64(breakeven)),
    })
}

#[derive(Serialize)]
struct BudgetReport {
    budget: TimeBudget,
    fixed_shots: SensitivityReport,
    fixed_total_time: Option<SensitivityReport>,
}

fn budget(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let format = cfg.output.format.unwrap_or(Format::Json);
    let params = cfg.sensor_params()?;
    let timing = cfg.timing.timing();
    let budget = time_budget(&params, &timing, cfg.timing.extended)?;
    let art = match format {
        Format::Json => {
            let fixed_shots = sensitivity_report(&params, ComparisonMode::FixedShots, true)?;
            let fixed_total_time = cfg
                .timing
                .total_time
                .map(|total_time| {
                    sensitivity_report(&params, ComparisonMode::FixedTotalTime { total_time, timing }, true)
                })
                .transpose()?;
            artifact("time_budget.json", to_json(&BudgetReport { budget, fixed_shots, fixed_total_time })?)
        }
        Format::Csv => {
            let text = format!(
                "t_cycle_hybrid,t_cycle_conv,tau_p,tau_w,tau_M,extended,degenerate\n{},{},{},{},{},{},{}\n",
                fmt_f64(budget.t_cycle_hybrid),
                fmt_f64(budget.t_cycle_conv),
                fmt_f64(budget.tau_p),
                fmt_f64(budget.tau_w),
                fmt_f64(budget.tau_m),
                budget.extended,
                budget.degenerate
            );
            artifact("time_budget.csv", text)
        }
        Format::Svg => return Err(unsupported("time-budget", format)),
    };
    let mut summary = format!(
        "hybrid cycle {:e} s, conventional cycle {:e} s",
        budget.t_cycle_hybrid, budget.t_cycle_conv
    );
    if budget.degenerate {
        summary.push_str(" [hybrid cycle is zero]");
    }
    Ok(Outcome { artifacts: vec![art], exit_code: 0, summary })
}

fn listing(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.sensor_params()?;
    let seq = transcript(&params);
    let art = match cfg.output.format {
        None => artifact("transcript.txt", seq.to_string()),
        Some(Format::Json) => artifact("transcript.json", to_json(&seq)?),
        Some(f) => return Err(unsupported("transcript", f)),
    };
    let summary = format!("{} steps, {} two-qubit gates", seq.steps.len(), seq.two_qubit_gates());
    Ok(Outcome { artifacts: vec![art], exit_code: 0, summary })
}
