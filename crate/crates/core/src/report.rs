//! CSV output for sweep tables. Floats carry 17 significant digits so every
//! value round-trips exactly.

use std::io::Write;

use crate::error::{Error, Result};
use crate::estimation::{SweepRow, SWEEP_HEADER};
use crate::optimizer::OptimizationResult;

pub const FIGURE3_HEADER: [&str; 5] = ["epsilon", "r_star", "N_star", "alpha_star", "capped"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Serialization(e.to_string()))
}

pub fn write_figure3_csv<W: Write>(out: W, rows: &[OptimizationResult]) -> Result<()> {
    write_table(
        out,
        &FIGURE3_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.r_star),
                r.n_star.to_string(),
                fmt_f64(r.alpha_star),
                r.capped.to_string(),
            ]
        }),
    )
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_table(
        out,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                r.scheme.as_str().to_string(),
                r.n.to_string(),
                fmt_f64(r.alpha),
                fmt_f64(r.epsilon),
                r.m.to_string(),
                fmt_f64(r.delta_omega),
                fmt_f64(r.ratio_r),
                r.delta_omega_empirical.map(fmt_f64).unwrap_or_default(),
            ]
        }),
    )
}
