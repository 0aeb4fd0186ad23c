//! Validation runs of the two-soliton reduction: the case data is evolved by
//! the split-step solver, decomposed at every sample and compared with the
//! reduced ODE prediction; scaling studies fit the error exponent in `h`.

mod config;
pub mod predict;
mod report;
mod run;
mod scaling;

use thiserror::Error;

pub use config::{default_grid, ExperimentConfig, GridOverrides, OdeVariant, Resolved, TEndMode};
pub use report::{emit_report, emit_scaling};
pub use run::{run_case, Heatmap, RidgeRow, SampleRow, Summary, ValidationReport, MAX_VIOLATION_FRACTION};
pub use scaling::{fit_line, scaling_study, ScalingPoint, ScalingReport};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Spectral(#[from] nls_spectral::SpectralError),
    #[error(transparent)]
    Soliton(#[from] nls_soliton::SolitonError),
    #[error(transparent)]
    Solver(#[from] nls_solver::SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
