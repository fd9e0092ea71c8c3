//! TOML experiment configuration. Every key has a default, so an empty file
//! describes the reinsurance experiment grid.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use levy_rare_core::{AlgoParams, BarrierEvent, Event, Mode, Model, Params};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Importance sampling with exact stick increments.
    Algo2,
    /// Importance sampling with the Gaussian small-jump substitute.
    Algo3,
    Crude,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Algo2, Estimator::Algo3, Estimator::Crude];

    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Algo2 => "algo2",
            Estimator::Algo3 => "algo3",
            Estimator::Crude => "crude",
        }
    }

    pub fn mode(&self) -> Option<Mode> {
        match self {
            Estimator::Algo2 => Some(Mode::ExactSba),
            Estimator::Algo3 => Some(Mode::Ara),
            Estimator::Crude => None,
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "algo2" => Ok(Estimator::Algo2),
            "algo3" => Ok(Estimator::Algo3),
            "crude" => Ok(Estimator::Crude),
            other => Err(HarnessError::Config(format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub kind: String,
    /// Tail index for single-model commands (`diagnose`); grids use `alpha_list`.
    pub alpha: f64,
    /// Total jump arrival rate, split evenly between the two tails.
    pub rate: f64,
    pub sigma: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: "bm_plus_two_sided_pareto".into(),
            alpha: 1.6,
            rate: Model::EXPERIMENT_RATE,
            sigma: 1.0,
        }
    }
}

impl ModelConfig {
    pub fn build(&self, alpha: f64) -> Result<Model> {
        if self.kind != "bm_plus_two_sided_pareto" {
            return Err(HarnessError::Config(format!("unknown model kind {:?}", self.kind)));
        }
        Ok(Model::bm_plus_two_sided_pareto(alpha, self.rate, self.sigma)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    OneSided,
    DownAndIn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EventConfig {
    pub kind: EventKind,
    pub a: f64,
    pub b: f64,
    /// Drift added by the down-and-in event.
    pub c: Option<f64>,
}

impl Default for EventConfig {
    fn default() -> Self {
        Self {
            kind: EventKind::OneSided,
            a: 2.0,
            b: 1.15,
            c: None,
        }
    }
}

/// A validated event of either kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventChoice {
    OneSided(Event),
    DownAndIn(BarrierEvent),
}

impl EventConfig {
    pub fn build(&self) -> Result<EventChoice> {
        match self.kind {
            EventKind::OneSided => {
                if self.c.is_some() {
                    return Err(HarnessError::Config("event.c only applies to down_and_in".into()));
                }
                Ok(EventChoice::OneSided(Event::new(self.a, self.b)?))
            }
            EventKind::DownAndIn => {
                let c = self
                    .c
                    .ok_or_else(|| HarnessError::Config("down_and_in needs event.c".into()))?;
                Ok(EventChoice::DownAndIn(BarrierEvent::new(self.a, self.b, c)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub gamma: f64,
    pub w: f64,
    pub rho: f64,
    pub d: f64,
    pub kappa: f64,
    pub r: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = Params::experiment(1, Mode::ExactSba);
        Self {
            gamma: p.gamma,
            w: p.w,
            rho: p.rho,
            d: p.d,
            kappa: p.kappa,
            r: p.r,
        }
    }
}

impl ParamsConfig {
    pub fn at(&self, n: usize, mode: Mode) -> Params {
        AlgoParams {
            n,
            gamma: self.gamma,
            w: self.w,
            rho: self.rho,
            d: self.d,
            kappa: self.kappa,
            r: self.r,
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    /// Replications per importance-sampling cell.
    pub is_samples: u64,
    pub crude_min_samples: u64,
    /// Guardrail on crude cells; a warning is printed when it binds.
    pub crude_max_samples: u64,
    /// Crude cells stop after this many hits (`N ≈ hits/p̂`).
    pub crude_hits: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            is_samples: 10_000,
            crude_min_samples: 10_000,
            crude_max_samples: 20_000_000,
            crude_hits: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticConfig {
    pub z_list: Vec<f64>,
    pub t_list: Vec<f64>,
    pub delta_list: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    pub samples: u64,
    /// Cells whose empirical constant exceeds this are flagged.
    pub bound: f64,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        Self {
            z_list: vec![2.0, 10.0, 100.0],
            t_list: vec![0.01, 0.1, 1.0, 10.0],
            delta_list: vec![0.01, 0.1, 1.0],
            x_min: -3.0,
            x_max: 3.0,
            x_step: 0.01,
            samples: 100_000,
            bound: 0.6,
        }
    }
}

impl DiagnosticConfig {
    pub fn x_grid(&self) -> Vec<f64> {
        let steps = ((self.x_max - self.x_min) / self.x_step + 1e-9).floor() as usize;
        (0..=steps).map(|i| self.x_min + i as f64 * self.x_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: PathBuf,
    pub modes: Vec<Estimator>,
    pub alpha_list: Vec<f64>,
    pub n_list: Vec<usize>,
    /// Write measured wall time per cell; when off the column is 0 so that
    /// reruns produce identical files.
    pub record_wall_time: bool,
    pub model: ModelConfig,
    pub event: EventConfig,
    pub params: ParamsConfig,
    pub samples: SampleConfig,
    pub diagnostic: DiagnosticConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            output: PathBuf::from("results.csv"),
            modes: Estimator::ALL.to_vec(),
            alpha_list: vec![1.45, 1.6, 1.75],
            n_list: (1..=5).map(|i| 200 * i).collect(),
            record_wall_time: true,
            model: ModelConfig::default(),
            event: EventConfig::default(),
            params: ParamsConfig::default(),
            samples: SampleConfig::default(),
            diagnostic: DiagnosticConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Rejects anything that would fail once sampling has started.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.modes.is_empty() {
            return bad("modes must not be empty".into());
        }
        if self.alpha_list.is_empty() || self.n_list.is_empty() {
            return bad("alpha_list and n_list must not be empty".into());
        }
        if self.samples.is_samples == 0 || self.samples.crude_hits == 0 {
            return bad("is_samples and crude_hits must be positive".into());
        }
        if self.samples.crude_max_samples < self.samples.crude_min_samples.max(1) {
            return bad("crude_max_samples must be at least crude_min_samples".into());
        }
        let event = self.event.build()?;
        let cap = match event {
            EventChoice::OneSided(e) => Some(e.b()),
            EventChoice::DownAndIn(_) => None,
        };
        for &alpha in &self.alpha_list {
            self.model.build(alpha)?;
        }
        self.model.build(self.model.alpha)?;
        for &n in &self.n_list {
            for est in &self.modes {
                if let Some(mode) = est.mode() {
                    self.params.at(n, mode).validate(cap)?;
                    if event_is_barrier(&event) && !(n as f64 * self.params.gamma > 1.0) {
                        return bad(format!("barrier estimator needs n*gamma > 1 (n = {n})"));
                    }
                }
            }
        }
        let d = &self.diagnostic;
        if d.z_list.iter().any(|&z| !(z > 1.0)) {
            return bad("diagnostic z values must exceed 1".into());
        }
        if d.t_list.iter().chain(&d.delta_list).any(|&v| !(v > 0.0)) {
            return bad("diagnostic t and delta values must be positive".into());
        }
        if !(d.x_step > 0.0) || !(d.x_max >= d.x_min) || d.samples == 0 {
            return bad("diagnostic grid is empty".into());
        }
        Ok(())
    }
}

fn event_is_barrier(e: &EventChoice) -> bool {
    matches!(e, EventChoice::DownAndIn(_))
}
