//! Long-format series for the relative-error plot: one row per point with
//! its series label and line style.

use std::io::Write;

use crate::config::Estimator;
use crate::experiment::{fmt_f64, RunSummary};

pub const PLOT_HEADER: [&str; 6] = ["series", "estimator", "alpha", "n", "rel_error", "linestyle"];

pub fn linestyle(estimator: Estimator) -> &'static str {
    match estimator {
        Estimator::Algo2 => "dashed",
        Estimator::Algo3 => "dotted",
        Estimator::Crude => "solid",
    }
}

/// Points sorted by series then `n`; cells without a finite positive
/// relative error are dropped since they cannot sit on a log axis.
pub fn plot_rows(rows: &[RunSummary]) -> Vec<RunSummary> {
    let mut pts: Vec<RunSummary> = rows
        .iter()
        .filter(|r| r.rel_error.is_finite() && r.rel_error > 0.0)
        .cloned()
        .collect();
    pts.sort_by(|a, b| {
        (a.estimator, a.alpha, a.n)
            .partial_cmp(&(b.estimator, b.alpha, b.n))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts
}

pub fn write_plot_data<W: Write>(out: W, rows: &[RunSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PLOT_HEADER)?;
    for r in plot_rows(rows) {
        w.write_record([
            format!("{} alpha={}", r.estimator, r.alpha),
            r.estimator.to_string(),
            fmt_f64(r.alpha),
            r.n.to_string(),
            fmt_f64(r.rel_error),
            linestyle(r.estimator).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
