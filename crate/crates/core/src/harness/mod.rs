//! Experiment orchestration: configuration, multi-run protocol, statistics,
//! reports and the command line.

pub mod cli;
pub mod config;
pub mod report;
pub mod runner;
pub mod stats;

pub use cli::{cli_main, selection_check};
pub use config::{resolve, ConfigOverrides, ExperimentConfig, SelectionParams, Variant};
pub use report::{emit_reports, read_summary};
pub use runner::{
    load_dataset, run_experiment, run_once, run_seed, Experiment, Parallelism, RunRecord,
};
pub use stats::{Metric, MetricStats, SummaryStats};
