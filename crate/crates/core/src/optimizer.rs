//! Maximisation of the relative sensitivity `r(ε, N, α)` and the sweep of
//! its optimum over gate error.

use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::ratio_r;
use crate::error::{Error, Result};

pub const DEFAULT_N_MAX: u32 = 100_000;
/// Below this bound the outer search over `N` is exhaustive.
pub const EXHAUSTIVE_LIMIT: u32 = 1_000;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))` once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let x = golden_section_max_by(|a, b| f(a) - f(b), lo, hi, tol);
    (x, f(x))
}

/// Golden-section search driven by a difference oracle `diff(a, b) = f(a) − f(b)`.
///
/// Near a smooth maximum `f` itself is flat to within rounding over a window
/// of relative width about `√ulp`; a difference evaluated without
/// cancellation resolves the peak to a few ulps instead.
pub fn golden_section_max_by<D: Fn(f64, f64) -> f64>(diff: D, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    while b - a > tol && c < d {
        if diff(c, d) >= 0.0 {
            b = d;
            d = c;
            c = b - INV_PHI * (b - a);
        } else {
            a = c;
            c = d;
            d = a + INV_PHI * (b - a);
        }
    }
    0.5 * (a + b)
}

/// `ln(r(ε, N, a) / r(ε, N, b))`. The `ε` and `N` factors cancel exactly, so
/// only `ln(a/b) − (a² − b²)` remains; both terms are formed without
/// subtracting nearly equal numbers.
pub fn log_ratio_r_alpha(a: f64, b: f64) -> f64 {
    ((a - b) / b).ln_1p() - (a - b) * (a + b)
}

/// Numerical inner optimum of `r` over `α` (the analytic value is `1/√2`).
pub fn numeric_alpha_star() -> f64 {
    golden_section_max_by(log_ratio_r_alpha, 1e-3, 5.0, 1e-14)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub epsilon: f64,
    #[serde(rename = "N_star")]
    pub n_star: u32,
    pub alpha_star: f64,
    pub r_star: f64,
    /// `N_star` reached the search bound.
    pub capped: bool,
}

/// `ln r` at `α = 1/√2`, where the α-dependent prefactor equals one.
fn log_envelope(log_keep: f64, n: u32) -> f64 {
    (2 * n + 1) as f64 * log_keep + 0.5 * (n as f64).ln()
}

fn best_in(log_keep: f64, range: std::ops::RangeInclusive<u32>) -> (u32, f64) {
    let mut best = (*range.start(), f64::NEG_INFINITY);
    for n in range {
        let v = log_envelope(log_keep, n);
        if v > best.1 {
            best = (n, v);
        }
    }
    best
}

/// Integer golden-section search on the concave `log_envelope`.
fn golden_integer(log_keep: f64, mut lo: u32, mut hi: u32) -> (u32, f64) {
    let f = |n: u32| log_envelope(log_keep, n);
    while hi - lo > 4 {
        let span = (hi - lo) as f64;
        let c = hi - (INV_PHI * span).round() as u32;
        let d = lo + (INV_PHI * span).round() as u32;
        let (c, d) = (c.min(d), c.max(d));
        if f(c) >= f(d) {
            hi = d;
        } else {
            lo = c + 1;
        }
    }
    best_in(log_keep, lo..=hi)
}

/// `max_{N ≤ n_max, α > 0} r(ε, N, α)`. The inner optimum is `α = 1/√2`
/// for every `(ε, N)`; ties in `N` go to the smaller value.
pub fn optimize_r(epsilon: f64, n_max: u32) -> Result<OptimizationResult> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!("epsilon must be in [0, 1), got {epsilon}")));
    }
    if n_max == 0 {
        return Err(Error::InvalidArgument("N_max must be at least 1".into()));
    }
    let log_keep = (-epsilon).ln_1p();
    let head_end = n_max.min(EXHAUSTIVE_LIMIT);
    let mut best = best_in(log_keep, 1..=head_end);
    if n_max > head_end {
        let tail = golden_integer(log_keep, head_end + 1, n_max);
        if tail.1 > best.1 {
            best = tail;
        }
    }
    let n_star = best.0;
    Ok(OptimizationResult {
        epsilon,
        n_star,
        alpha_star: FRAC_1_SQRT_2,
        r_star: ratio_r(epsilon, n_star, FRAC_1_SQRT_2),
        capped: n_star == n_max,
    })
}

/// Gate error at which `r*(ε)` drops to one, by bisection to `1e-5`.
pub fn breakeven_epsilon(n_max: u32) -> Result<f64> {
    let above_one = |eps: f64| optimize_r(eps, n_max).map(|r| r.r_star > 1.0);
    let (mut lo, mut hi) = (0.0, 0.5);
    if above_one(hi)? {
        return Err(Error::InvalidArgument("r* exceeds one at epsilon = 0.5".into()));
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if above_one(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `10^{-4} … 10^{-1}`, 61 log-spaced points.
pub fn default_epsilon_grid() -> Vec<f64> {
    (0..61).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / 60.0)).collect()
}

/// Optimum per grid point, in grid order.
pub fn figure3_sweep(eps_grid: &[f64], n_max: u32) -> Result<Vec<OptimizationResult>> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("epsilon grid is empty".into()));
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("epsilon grid must be strictly increasing".into()));
    }
    eps_grid.par_iter().map(|&eps| optimize_r(eps, n_max)).collect()
}

/// `e^{−1/2}·√(−1/(4 ln(1−ε)))·(1−ε)`, the optimum over real `N`.
pub fn continuous_bound(epsilon: f64) -> f64 {
    let l = (-epsilon).ln_1p();
    (-0.5f64).exp() * (-1.0 / (4.0 * l)).sqrt() * (1.0 - epsilon)
}
