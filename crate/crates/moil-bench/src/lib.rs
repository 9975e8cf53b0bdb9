//! Config-driven experiment harness over the workbench library: seeded sweep
//! cells with one shared demonstration draw per cell, disk-cached exact
//! fronts, and flat CSV results.
//!
//! Reruns of the same config are byte-identical except for the `wall_ms`
//! column, which is measured (tiny cells deterministically report 0).

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod runner;
pub mod summary;

pub use config::{EnvSpec, ExperimentConfig, Learner, Sweep};
pub use runner::{
    build_tabular_bundle, read_csv, run_experiment, write_csv, FrontCache, ResultRow, CSV_HEADER,
    UNSTABLE_DISTANCE,
};
pub use summary::{render_summary, summarize, SummaryCell};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Env(#[from] moil::envs::EnvError),
    #[error(transparent)]
    Momdp(#[from] moil::momdp::MomdpError),
    #[error(transparent)]
    Pareto(#[from] moil::pareto::ParetoError),
    #[error(transparent)]
    Lqr(#[from] moil::lqr::LqrError),
    #[error(transparent)]
    Serde(#[from] moil::io::IoError),
}

impl BenchError {
    /// True for errors caused by what the user typed (config file or CLI
    /// arguments) rather than by execution.
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, BenchError::Config(_) | BenchError::Csv(_))
    }
}
