//! Runs the (estimator × α × n) grid and stores one summary row per cell.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;

use levy_rare_core::barrier::BarrierEstimator;
use levy_rare_core::crude::{crude_estimate_adaptive, CrudeEvent};
use levy_rare_core::estimators::{validate_barrier_params, ValidationReport};
use levy_rare_core::kernels::derive_seed;
use levy_rare_core::{engine, validate_params, OneSidedEstimator, Summary};

use crate::config::{Estimator, EventChoice, ExperimentConfig};
use crate::error::{HarnessError, Result};

pub const CSV_HEADER: [&str; 8] = [
    "estimator",
    "alpha",
    "n",
    "mean",
    "variance",
    "rel_error",
    "samples",
    "wall_time_s",
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RunSummary {
    pub estimator: Estimator,
    pub alpha: f64,
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// `std / mean`; NaN when no hit was observed.
    pub rel_error: f64,
    pub samples: u64,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn from_summary(estimator: Estimator, alpha: f64, n: usize, s: &Summary, wall_time_s: f64) -> Self {
        Self {
            estimator,
            alpha,
            n,
            mean: s.mean,
            variance: s.variance(),
            rel_error: s.relative_error().unwrap_or(f64::NAN),
            samples: s.count,
            wall_time_s,
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance / self.samples as f64).sqrt()
    }

    fn record(&self) -> [String; 8] {
        [
            self.estimator.to_string(),
            fmt_f64(self.alpha),
            self.n.to_string(),
            fmt_f64(self.mean),
            fmt_f64(self.variance),
            fmt_f64(self.rel_error),
            self.samples.to_string(),
            fmt_f64(self.wall_time_s),
        ]
    }
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Master seed of one cell, so cells can be rerun in isolation.
pub fn cell_seed(seed: u64, estimator: Estimator, alpha: f64, n: usize) -> u64 {
    let s = derive_seed(seed, estimator as u64 + 1);
    derive_seed(derive_seed(s, alpha.to_bits()), n as u64)
}

/// Result of a crude cell, including whether `crude_max_samples` bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CrudeCell {
    pub summary: Summary,
    pub capped: bool,
}

pub fn run_crude_cell(cfg: &ExperimentConfig, alpha: f64, n: usize) -> Result<CrudeCell> {
    let model = cfg.model.build(alpha)?;
    let event = match cfg.event.build()? {
        EventChoice::OneSided(e) => CrudeEvent::OneSided(e),
        EventChoice::DownAndIn(e) => CrudeEvent::DownAndIn(e),
    };
    let s = &cfg.samples;
    let (summary, capped) = crude_estimate_adaptive(
        &model,
        &event,
        n,
        s.crude_min_samples,
        s.crude_max_samples,
        s.crude_hits,
        cell_seed(cfg.seed, Estimator::Crude, alpha, n),
    )?;
    Ok(CrudeCell { summary, capped })
}

pub fn run_is_cell(cfg: &ExperimentConfig, estimator: Estimator, alpha: f64, n: usize) -> Result<Summary> {
    let mode = estimator
        .mode()
        .ok_or_else(|| HarnessError::Config(format!("{estimator} is not an importance sampler")))?;
    let model = cfg.model.build(alpha)?;
    let params = cfg.params.at(n, mode);
    let seed = cell_seed(cfg.seed, estimator, alpha, n);
    let count = cfg.samples.is_samples;
    let summary = match cfg.event.build()? {
        EventChoice::OneSided(event) => {
            let est = OneSidedEstimator::new(params, &model, event)?;
            engine::replicate(seed, count, |rng| Ok(est.draw(rng)?.value))?
        }
        EventChoice::DownAndIn(spec) => {
            let est = BarrierEstimator::new(params, &model, spec)?;
            engine::replicate(seed, count, |rng| Ok(est.draw(rng)?.value))?
        }
    };
    Ok(summary)
}

/// Runs a single cell and reports a warning when a crude cell hit its cap.
pub fn run_cell(cfg: &ExperimentConfig, estimator: Estimator, alpha: f64, n: usize) -> Result<RunSummary> {
    let start = Instant::now();
    let summary = match estimator {
        Estimator::Crude => {
            let cell = run_crude_cell(cfg, alpha, n)?;
            if cell.capped {
                eprintln!(
                    "warning: crude cell alpha={alpha} n={n}: {} hits after crude_max_samples = {}; \
                     the {}-hit rule wants more samples",
                    cell.summary.nonzero, cfg.samples.crude_max_samples, cfg.samples.crude_hits
                );
            }
            cell.summary
        }
        _ => run_is_cell(cfg, estimator, alpha, n)?,
    };
    let wall = if cfg.record_wall_time {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    Ok(RunSummary::from_summary(estimator, alpha, n, &summary, wall))
}

/// All cells of the grid, α-major, then `n`, then estimator. Cells run
/// one after another; replications inside a cell run on the worker pool.
pub fn run_cells(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &alpha in &cfg.alpha_list {
        for &n in &cfg.n_list {
            for &est in &cfg.modes {
                rows.push(run_cell(cfg, est, alpha, n)?);
            }
        }
    }
    Ok(rows)
}

/// [`run_cells`] followed by writing the CSV to `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    let rows = run_cells(cfg)?;
    write_csv(&cfg.output, &rows)?;
    Ok(rows)
}

pub fn write_csv_to<W: Write>(out: W, rows: &[RunSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[RunSummary]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_csv_to(file, rows).map_err(|e| HarnessError::csv(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<RunSummary>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let headers = r.headers().map_err(|e| HarnessError::csv(path, e))?.clone();
    if !headers.is_empty() {
        for col in CSV_HEADER {
            if !headers.iter().any(|h| h == col) {
                return Err(HarnessError::Config(format!("{}: missing column {col}", path.display())));
            }
        }
    }
    r.deserialize()
        .collect::<csv::Result<Vec<RunSummary>>>()
        .map_err(|e| HarnessError::csv(path, e))
}

/// Regime checks for every (α, importance sampler) pair at the smallest `n`.
pub fn validation_reports(cfg: &ExperimentConfig) -> Result<Vec<(String, ValidationReport)>> {
    let n = *cfg.n_list.iter().min().unwrap_or(&1);
    let event = cfg.event.build()?;
    let mut out = Vec::new();
    for &alpha in &cfg.alpha_list {
        let model = cfg.model.build(alpha)?;
        for est in cfg.modes.iter().filter_map(|e| e.mode().map(|m| (e, m))) {
            let params = cfg.params.at(n, est.1);
            let report = match event {
                EventChoice::OneSided(e) => validate_params(&params, &e, &model),
                EventChoice::DownAndIn(_) => validate_barrier_params(&params, &model),
            };
            out.push((format!("{} alpha={alpha} n={n}", est.0), report));
        }
    }
    Ok(out)
}
