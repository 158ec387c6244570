//! Repeated holdout experiments.
//!
//! Each trial draws one train/test split, builds one forest per distinct
//! tree configuration among the configured estimators, and scores every
//! estimator on the same test set. Per-trial metric values are then
//! compared with t-tests and summarized as win/tie/loss tables.

pub mod ablation;
pub mod config;
pub mod report;
pub mod run;
pub mod stats;
pub mod table;

pub use ablation::{ablation_grid, Direction, Enhancement};
pub use config::{Comparison, DatasetSpec, EstimatorSpec, ExperimentConfig};
pub use report::{emit_report, read_trials_csv, render_summary};
pub use run::{run_experiment, run_experiment_with, run_trial, ExperimentOutput, TrialResult};
pub use stats::{paired_t_test, welch_t_test, TestKind, Verdict, WtlCell};
pub use table::{win_tie_loss_table, WtlTable};
