//! Probability estimation forests.
//!
//! Bagged probability estimation trees (B-PETs), the enhanced variant with
//! out-of-bag leaf counts, unsmoothed estimates and random feature selection
//! (EB-PETs), and the MOB-ESP estimator that conditions per-leaf class
//! frequencies on the ensemble's out-of-bag classification of the training
//! set. The [`harness`] module runs repeated holdout experiments over these
//! estimators and aggregates paired significance tests into win/tie/loss
//! tables.

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod estimators;
mod fingerprint;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod seed;
pub mod tree;

pub use dataset::{BootstrapSample, Dataset, LabelColumn};
pub use ensemble::{Ensemble, OobClassifications};
pub use error::{Error, Result};
pub use estimators::{EstimatorKind, EstimatorOptions, MobespMatrices, ProbEstimate, Smoothing};
pub use metrics::{MetricReport, ScoredSet};
pub use model::Model;
pub use tree::{LeafBins, SplitTest, Tree, TreeConfig};
