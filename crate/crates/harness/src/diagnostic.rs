//! Empirical check of the uniform Lipschitz bound on the law of the
//! truncated increment `X^{<z}(t)`:
//! `P(X^{<z}(t) ∈ [x, x+δ]) ≤ C δ / (t^λ ∧ 1)`.
//!
//! With `σ > 0` the Gaussian part alone gives `λ = 1/2` and
//! `C = 1/(σ√(2π))`.

use std::fmt;

use levy_rare_core::kernels::derive_seed;
use levy_rare_core::{JumpMeasure, LevyModel, RngHandle};

use crate::config::DiagnosticConfig;
use crate::error::Result;

/// Windows holding at least this share of all samples are reported but
/// never flagged: there `δ` covers the whole spread and the constant only
/// reflects the `1/δ` normalization.
pub const SATURATED_MASS: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCell {
    pub z: f64,
    pub t: f64,
    pub delta: f64,
    /// `sup_x P̂(X ∈ [x, x+δ])`.
    pub max_probability: f64,
    /// Location of the supremum on the grid.
    pub argmax: f64,
    /// `max_probability · (t^λ ∧ 1) / δ`.
    pub constant: f64,
    pub out_of_regime: bool,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub lambda: f64,
    /// `1/(σ√(2π))`, or infinity without a Gaussian part.
    pub theoretical: f64,
    pub bound: f64,
    pub samples: u64,
    pub cells: Vec<LipschitzCell>,
}

impl LipschitzReport {
    /// Largest constant over the cells that are in regime.
    pub fn max_constant(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| !c.out_of_regime)
            .map(|c| c.constant)
            .fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &LipschitzCell> {
        self.cells.iter().filter(|c| c.flagged)
    }
}

impl fmt::Display for LipschitzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "lambda = {}, theoretical C = {:.4}, flag bound = {}, samples per (z, t) = {}",
            self.lambda, self.theoretical, self.bound, self.samples
        )?;
        writeln!(f, "{:>8} {:>8} {:>8} {:>10} {:>8} {:>9}  note", "z", "t", "delta", "max P", "at x", "C_hat")?;
        for c in &self.cells {
            let note = if c.flagged {
                "FLAGGED"
            } else if c.out_of_regime {
                "out of regime"
            } else {
                ""
            };
            writeln!(
                f,
                "{:>8} {:>8} {:>8} {:>10.5} {:>8.2} {:>9.4}  {note}",
                c.z, c.t, c.delta, c.max_probability, c.argmax, c.constant
            )?;
        }
        writeln!(f, "max in-regime C_hat = {:.4}", self.max_constant())
    }
}

/// Largest empirical mass of a window `[x, x+δ]` with `x` on `grid`;
/// `sorted` must be ascending.
pub fn max_window_mass(sorted: &[f64], grid: &[f64], delta: f64) -> (f64, f64) {
    let n = sorted.len().max(1) as f64;
    let mut best = (0.0, grid.first().copied().unwrap_or(0.0));
    for &x in grid {
        let lo = sorted.partition_point(|&v| v < x);
        let hi = sorted.partition_point(|&v| v <= x + delta);
        let p = (hi - lo) as f64 / n;
        if p > best.0 {
            best = (p, x);
        }
    }
    best
}

pub fn lipschitz_diagnostic<M: JumpMeasure<f64>>(
    model: &LevyModel<f64, M>,
    cfg: &DiagnosticConfig,
    seed: u64,
) -> Result<LipschitzReport> {
    let lambda = 0.5;
    let sigma = model.brownian_scale();
    let theoretical = if sigma > 0.0 {
        1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    } else {
        f64::INFINITY
    };
    let grid = cfg.x_grid();
    let mut cells = Vec::new();
    for (i, &z) in cfg.z_list.iter().enumerate() {
        for (j, &t) in cfg.t_list.iter().enumerate() {
            let mut rng = RngHandle::new(derive_seed(seed, i as u64), j as u64);
            let mut xs = (0..cfg.samples)
                .map(|_| model.sample_truncated_increment(t, z, &mut rng))
                .collect::<levy_rare_core::Result<Vec<f64>>>()?;
            xs.sort_by(f64::total_cmp);
            for &delta in &cfg.delta_list {
                let (p, x) = max_window_mass(&xs, &grid, delta);
                let constant = p * t.powf(lambda).min(1.0) / delta;
                let out_of_regime = p >= SATURATED_MASS;
                cells.push(LipschitzCell {
                    z,
                    t,
                    delta,
                    max_probability: p,
                    argmax: x,
                    constant,
                    out_of_regime,
                    flagged: !out_of_regime && constant > cfg.bound,
                });
            }
        }
    }
    Ok(LipschitzReport {
        lambda,
        theoretical,
        bound: cfg.bound,
        samples: cfg.samples,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use levy_rare_core::Model;

    #[test]
    fn window_mass_counts_closed_interval() {
        let xs = [0.0, 0.5, 1.0, 2.0];
        assert_eq!(max_window_mass(&xs, &[0.0, 1.0], 1.0), (0.75, 0.0));
        assert_eq!(max_window_mass(&xs, &[5.0], 1.0).0, 0.0);
    }

    #[test]
    fn far_tail_cell_is_empty() {
        let model = Model::heavy_tail_experiment(1.6).unwrap();
        let cfg = DiagnosticConfig {
            z_list: vec![1e6],
            t_list: vec![1.0],
            delta_list: vec![0.1],
            x_min: 50.0,
            x_max: 60.0,
            x_step: 1.0,
            samples: 10_000,
            ..DiagnosticConfig::default()
        };
        let r = lipschitz_diagnostic(&model, &cfg, 3).unwrap();
        assert!(r.cells[0].max_probability < 1e-3);
        assert!(!r.cells[0].flagged);
    }

    #[test]
    fn wide_window_is_out_of_regime() {
        let model = Model::heavy_tail_experiment(1.6).unwrap();
        let cfg = DiagnosticConfig {
            z_list: vec![2.0],
            t_list: vec![0.01],
            delta_list: vec![5.0],
            x_min: -3.0,
            x_max: 0.0,
            x_step: 0.5,
            samples: 10_000,
            bound: 0.01,
        };
        let r = lipschitz_diagnostic(&model, &cfg, 3).unwrap();
        let c = &r.cells[0];
        assert!(c.max_probability > 0.99);
        assert!(c.out_of_regime && !c.flagged);
        assert!((r.theoretical - 0.398_942_280_401_432_7).abs() < 1e-15);
    }
}
