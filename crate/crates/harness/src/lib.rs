//! Experiment harness for the heavy-tailed rare-event estimators: TOML
//! configuration, grid runs with CSV output, the relative-error table, the
//! Lipschitz diagnostic and plot-ready series.

pub mod config;
pub mod diagnostic;
pub mod error;
pub mod experiment;
pub mod plot_data;
pub mod table;

pub use config::{Estimator, ExperimentConfig};
pub use diagnostic::{lipschitz_diagnostic, LipschitzReport};
pub use error::{HarnessError, Result};
pub use experiment::{read_csv, run_cell, run_experiment, write_csv, RunSummary};
pub use table::render_table;
