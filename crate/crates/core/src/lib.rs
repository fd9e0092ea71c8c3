//! Rare-event simulation for heavy-tailed Lévy processes.
//!
//! Estimates `P(sup_{t≤1} X̄_n(t) ≥ a, every upward jump of X̄_n < b)` with
//! `X̄_n(t) = X(nt)/n` by importance sampling over the large jumps,
//! stick-breaking for the suprema in between, randomized debiasing of the
//! stick truncation and, when small jumps cannot be sampled exactly, a
//! Gaussian substitution of the small-jump martingale. A down-and-in variant
//! and an exact crude Monte Carlo baseline are included.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod ara;
pub mod barrier;
pub mod crude;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod model;
pub mod params;
pub mod real;
pub mod skeleton;
pub mod stats;
pub mod stick_breaking;

pub use error::{Error, Result};
pub use estimators::{debiased_z, estimator_draw, validate_params, EstimatorDraw, OneSidedEstimator};
pub use kernels::RngHandle;
pub use model::{JumpMeasure, LevyModel, TwoSidedPareto};
pub use params::{AlgoParams, BarrierEventSpec, EventSpec, Mode};
pub use real::Real;
pub use stats::Summary;

pub type Model = model::HeavyTailExperimentModel<f64>;
pub type Params = AlgoParams<f64>;
pub type Event = EventSpec<f64>;
pub type BarrierEvent = BarrierEventSpec<f64>;
pub type Draw = EstimatorDraw<f64>;
pub type Skeleton = skeleton::BigJumpSkeleton<f64>;
