//! CSV tables and number formatting.

use std::io::Write;

use isingcw_core::simulation::CellSummary;
use isingcw_core::ErrorRecord;

use crate::error::AppError;

pub const RECORD_HEADER: [&str; 9] =
    ["k", "sigma", "rep", "zbar_log", "z_log", "diff", "ratio", "theta0_bar", "theta1_bar"];

pub const SUMMARY_HEADER: [&str; 9] = [
    "k",
    "sigma",
    "reps",
    "mean_diff",
    "sd_diff",
    "mean_abs_diff",
    "se_abs_diff",
    "median_abs_ratio_dev",
    "mad_abs_ratio_dev",
];

/// Shortest string that parses back to the same `f64`; switches to
/// exponent notation for very large and very small magnitudes.
pub fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_records<W: Write>(records: &[ErrorRecord], out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            real(r.sigma),
            r.rep.to_string(),
            real(r.zbar_log),
            real(r.z_log),
            real(r.diff),
            real(r.ratio),
            real(r.theta0_bar),
            real(r.theta1_bar),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(cells: &[CellSummary], out: W) -> Result<(), AppError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for c in cells {
        w.write_record([
            c.k.to_string(),
            real(c.sigma),
            c.reps.to_string(),
            real(c.mean_diff),
            real(c.sd_diff),
            real(c.mean_abs_diff),
            real(c.se_abs_diff),
            real(c.median_abs_ratio_dev),
            real(c.mad_abs_ratio_dev),
        ])?;
    }
    w.flush()?;
    Ok(())
}
