//! Relative-error table: one block per α with rows algo2, algo3, crude and
//! one column per `n`.

use std::fmt::Write;

use crate::config::Estimator;
use crate::experiment::RunSummary;

/// Placeholder for cells that are missing or have no finite value.
pub const GAP: &str = "-";

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn render_table(rows: &[RunSummary]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let alphas = sorted_unique(rows.iter().map(|r| r.alpha).collect());
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();

    let mut out = String::new();
    let _ = write!(out, "{:<6} {:<6}", "alpha", "");
    for n in &ns {
        let _ = write!(out, " {:>9}", format!("n={n}"));
    }
    out.push('\n');
    for &alpha in &alphas {
        for (i, est) in Estimator::ALL.iter().enumerate() {
            let label = if i == 0 { format!("{alpha}") } else { String::new() };
            let _ = write!(out, "{label:<6} {:<6}", est.as_str());
            for &n in &ns {
                // last row wins if a cell was written twice
                let cell = rows
                    .iter()
                    .rev()
                    .find(|r| r.estimator == *est && r.alpha == alpha && r.n == n)
                    .map(|r| r.rel_error)
                    .filter(|v| v.is_finite());
                match cell {
                    Some(v) => {
                        let _ = write!(out, " {v:>9.2}");
                    }
                    None => {
                        let _ = write!(out, " {GAP:>9}");
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}
