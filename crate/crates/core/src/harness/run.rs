//! Holdout trials and whole experiments.

use std::collections::BTreeSet;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{filter_classes, holdout_split, load_csv, Dataset};
use crate::ensemble::{build_ensemble, Ensemble};
use crate::error::{Error, Result};
use crate::estimators::{
    self, build_mobesp_matrices, EstimatorKind, EstimatorOptions, MobespMatrices,
};
use crate::harness::config::{DatasetSpec, ExperimentConfig};
use crate::metrics::{lift_curve, MetricReport, ScoredSet};
use crate::seed;
use crate::tree::TreeConfig;

/// Stream key of the holdout shuffle under a trial seed.
const SPLIT_STREAM: u64 = 0;
/// Stream key of the forest master seed under a trial seed. Every forest of
/// a trial uses it, whatever its tree configuration.
const FOREST_STREAM: u64 = 1;

/// Metrics of one estimator on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub dataset: String,
    pub trial: usize,
    pub estimator: String,
    pub report: MetricReport,
    /// Digest of the train/test index partition.
    pub partition_digest: String,
    /// Digest of the forest the estimator was scored from.
    pub forest_digest: String,
    /// Forest build plus estimator preparation and scoring. Not part of the
    /// reproducible output.
    #[serde(skip)]
    pub duration: Duration,
}

/// Lift-chart points for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftData {
    pub dataset: String,
    pub estimator: String,
    pub class: usize,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutput {
    /// One per estimator, in configuration order.
    pub results: Vec<TrialResult>,
    /// Per estimator and class, filled only when requested.
    pub lift: Vec<LiftData>,
}

/// An estimator with its resolved options.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedEstimator {
    pub id: String,
    pub options: EstimatorOptions,
    pub tree: TreeConfig,
}

pub fn prepare_estimators(cfg: &ExperimentConfig) -> Result<Vec<PreparedEstimator>> {
    cfg.estimators
        .iter()
        .map(|e| {
            let (options, tree) = e.resolve(cfg.min_leaf_examples)?;
            Ok(PreparedEstimator {
                id: e.id.clone(),
                options,
                tree,
            })
        })
        .collect()
}

struct Forest {
    config: TreeConfig,
    ensemble: Ensemble,
    digest: String,
    build_time: Duration,
    /// MOB-ESP matrices already built on this forest, keyed by alpha bits.
    matrices: Vec<(u64, MobespMatrices)>,
}

/// Runs one holdout trial: one split, one forest per distinct tree
/// configuration (all built from the same forest seed), every estimator
/// scored on the same test partition.
#[allow(clippy::too_many_arguments)]
pub fn run_trial(
    dataset: &Dataset,
    dataset_id: &str,
    estimators: &[PreparedEstimator],
    num_trees: usize,
    test_fraction: f64,
    trial: usize,
    trial_seed: u64,
    with_lift: bool,
) -> Result<TrialOutput> {
    let context =
        |e: Error| Error::InvalidDataset(format!("dataset {dataset_id}, trial {trial}: {e}"));
    let mut split_rng = seed::rng(seed::derive(trial_seed, SPLIT_STREAM));
    let split = holdout_split(dataset, test_fraction, &mut split_rng).map_err(context)?;
    let partition_digest = split.digest();
    let forest_seed = seed::derive(trial_seed, FOREST_STREAM);
    let train_priors = split.train.priors();

    let mut forests: Vec<Forest> = Vec::new();
    let mut results = Vec::with_capacity(estimators.len());
    let mut lift = Vec::new();
    for est in estimators {
        let start = Instant::now();
        let fi = match forests.iter().position(|f| f.config == est.tree) {
            Some(i) => i,
            None => {
                let ensemble = build_ensemble(&split.train, num_trees, &est.tree, forest_seed)
                    .map_err(context)?;
                forests.push(Forest {
                    config: est.tree.clone(),
                    digest: ensemble.digest(),
                    ensemble,
                    build_time: start.elapsed(),
                    matrices: Vec::new(),
                });
                forests.len() - 1
            }
        };
        let prep_start = Instant::now();
        let forest = &mut forests[fi];
        let mats = if est.options.kind == EstimatorKind::Mobesp {
            let key = est.options.alpha.to_bits();
            let pos = match forest.matrices.iter().position(|(k, _)| *k == key) {
                Some(p) => p,
                None => {
                    let oob = forest
                        .ensemble
                        .oob_classify_training_set(&split.train)
                        .map_err(context)?;
                    let m =
                        build_mobesp_matrices(&forest.ensemble, &split.train, &oob, &est.options)
                            .map_err(context)?;
                    forest.matrices.push((key, m));
                    forest.matrices.len() - 1
                }
            };
            Some(&forest.matrices[pos].1)
        } else {
            None
        };
        let estimates = split
            .test
            .rows()
            .map(|x| estimators::predict(&forest.ensemble, &est.options, mats, x))
            .collect::<Result<Vec<_>>>()
            .map_err(context)?;
        let scored = ScoredSet::new(
            estimates,
            split.test.labels().to_vec(),
            train_priors.clone(),
        )
        .map_err(context)?;
        let report = MetricReport::compute(&scored).map_err(context)?;
        if with_lift {
            for class in 0..scored.num_classes() {
                lift.push(LiftData {
                    dataset: dataset_id.to_string(),
                    estimator: est.id.clone(),
                    class,
                    points: lift_curve(&scored, class).map_err(context)?,
                });
            }
        }
        results.push(TrialResult {
            dataset: dataset_id.to_string(),
            trial,
            estimator: est.id.clone(),
            report,
            partition_digest: partition_digest.clone(),
            forest_digest: forest.digest.clone(),
            duration: forest.build_time + prep_start.elapsed(),
        });
    }
    Ok(TrialOutput { results, lift })
}

/// A failure confined to one dataset (or one of its trials).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunError {
    pub dataset: String,
    pub trial: Option<usize>,
    pub message: String,
}

/// Class index to original label, per dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pub dataset: String,
    pub class_names: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    /// Ordered by dataset (configuration order), trial, then estimator
    /// (configuration order).
    pub results: Vec<TrialResult>,
    /// Lift curves from trial 0 of each dataset.
    pub lift: Vec<LiftData>,
    pub errors: Vec<RunError>,
    pub label_maps: Vec<LabelMap>,
}

pub fn load_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    let d = load_csv(&spec.path, &spec.label)?;
    match &spec.classes {
        Some((a, b)) => filter_classes(&d, (a, b)),
        None => Ok(d),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    run_experiment_with(cfg, &BTreeSet::new(), |_| {})
}

/// Runs every (dataset, trial) not listed in `skip`, in parallel. `sink`
/// sees each trial's results as soon as they are complete (one call at a
/// time, in completion order); the returned output is sorted and does not
/// depend on scheduling. A dataset that fails to load, or a trial that
/// fails, is recorded in `errors` without stopping the rest.
pub fn run_experiment_with<F>(
    cfg: &ExperimentConfig,
    skip: &BTreeSet<(String, usize)>,
    sink: F,
) -> Result<ExperimentOutput>
where
    F: FnMut(&[TrialResult]) + Send,
{
    cfg.validate()?;
    let estimators = prepare_estimators(cfg)?;
    let mut out = ExperimentOutput::default();
    let mut loaded = Vec::new();
    for spec in &cfg.datasets {
        let id = spec.id();
        match load_dataset(spec) {
            Ok(d) => {
                out.label_maps.push(LabelMap {
                    dataset: id.clone(),
                    class_names: d.class_names().to_vec(),
                });
                loaded.push((id, d));
            }
            Err(e) => out.errors.push(RunError {
                dataset: id,
                trial: None,
                message: e.to_string(),
            }),
        }
    }
    let jobs: Vec<(usize, usize)> = loaded
        .iter()
        .enumerate()
        .flat_map(|(di, (id, _))| {
            (0..cfg.trials)
                .filter(move |&t| !skip.contains(&(id.clone(), t)))
                .map(move |t| (di, t))
        })
        .collect();
    let sink = Mutex::new(sink);
    let outcomes: Vec<(usize, usize, Result<TrialOutput>)> = jobs
        .par_iter()
        .map(|&(di, trial)| {
            let (id, d) = &loaded[di];
            let ts = seed::trial_seed(cfg.master_seed, id, trial);
            let r = run_trial(
                d,
                id,
                &estimators,
                cfg.trees,
                cfg.test_fraction,
                trial,
                ts,
                trial == 0,
            );
            if let Ok(o) = &r {
                let mut s = sink.lock().unwrap_or_else(|p| p.into_inner());
                (*s)(&o.results);
            }
            (di, trial, r)
        })
        .collect();
    for (di, trial, r) in outcomes {
        match r {
            Ok(o) => {
                out.results.extend(o.results);
                out.lift.extend(o.lift);
            }
            Err(e) => out.errors.push(RunError {
                dataset: loaded[di].0.clone(),
                trial: Some(trial),
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}
