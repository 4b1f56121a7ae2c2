//! Experiment harness around `mecrec-core`: configuration, the Case I and
//! Case II pipelines, reports, file exports and the figure replication.

pub mod config;
mod error;
pub mod export;
pub mod harness;
pub mod replicate;
pub mod report;

pub use config::ExperimentConfig;
pub use error::HarnessError;
pub use harness::{run, run_case1, run_case2, run_case2_with, MeasuredSource, RunOutput};
pub use report::ReconReport;
