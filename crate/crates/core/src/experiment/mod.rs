//! Config-driven runs: load, preprocess, resample, fit the roster, evaluate
//! on the holdout split and by stratified cross-validation, and write
//! reports. Also the exploratory data summary.

pub mod config;
pub mod explore;
pub mod runner;

pub use config::{default_roster, ExperimentConfig, Preset};
pub use explore::{explore, explore_table, ExploreSummary};
pub use runner::{evaluate_saved, execute, execute_on_table, run_experiment, RunSummary};
