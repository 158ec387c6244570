//! Experiment configuration, read from TOML.
//!
//! ```toml
//! master_seed = 42
//! trials = 100            # default 100
//! trees = 128             # default 128
//! test_fraction = 0.3333  # default 1/3
//! confidence = 0.1        # significance when p < confidence
//! test = "paired"         # or "welch"
//!
//! [[datasets]]
//! path = "data/iris.csv"  # relative to the config file
//! label = 4               # column index, or a header name
//! classes = ["versicolor", "virginica"]
//!
//! [[estimators]]
//! id = "bpets"
//! kind = "bpets"
//!
//! [[estimators]]
//! id = "mobesp"
//! kind = "mobesp"
//!
//! [[comparisons]]
//! baseline = "bpets"
//! challenger = "mobesp"
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::LabelColumn;
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, EstimatorOptions, Smoothing};
use crate::harness::stats::TestKind;
use crate::tree::TreeConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_trees")]
    pub trees: usize,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub test: TestKind,
    /// Baseline/challenger pairs for win/tie/loss tables. When empty, the
    /// first estimator is compared against each of the others.
    #[serde(default)]
    pub comparisons: Vec<Comparison>,
    #[serde(default = "default_min_leaf")]
    pub min_leaf_examples: usize,
}

fn default_trials() -> usize {
    100
}

fn default_trees() -> usize {
    128
}

fn default_test_fraction() -> f64 {
    1.0 / 3.0
}

fn default_confidence() -> f64 {
    0.1
}

fn default_min_leaf() -> usize {
    2
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            trials: default_trials(),
            trees: default_trees(),
            test_fraction: default_test_fraction(),
            master_seed: 0,
            estimators: Vec::new(),
            confidence: default_confidence(),
            test: TestKind::default(),
            comparisons: Vec::new(),
            min_leaf_examples: default_min_leaf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    /// Defaults to the file stem.
    #[serde(default)]
    pub id: Option<String>,
    pub path: PathBuf,
    pub label: LabelColumn,
    /// Keep only these two classes (original label strings).
    #[serde(default)]
    pub classes: Option<(String, String)>,
}

impl DatasetSpec {
    pub fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| self.path.display().to_string())
        })
    }
}

/// One estimator in an experiment. Unset fields take the defaults of the
/// kind:
///
/// | kind   | include_oob | smoothing | random_features |
/// |--------|-------------|-----------|-----------------|
/// | bpets  | false       | laplace   | false           |
/// | ebpets | true        | laplace   | false           |
/// | mobesp | n/a         | n/a       | true            |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub id: String,
    pub kind: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_oob: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<Smoothing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_features: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

impl EstimatorSpec {
    pub fn new(id: &str, kind: EstimatorKind) -> Self {
        EstimatorSpec {
            id: id.to_string(),
            kind,
            include_oob: None,
            smoothing: None,
            random_features: None,
            alpha: None,
            m: None,
        }
    }

    pub fn include_oob(mut self, on: bool) -> Self {
        self.include_oob = Some(on);
        self
    }

    pub fn smoothing(mut self, s: Smoothing) -> Self {
        self.smoothing = Some(s);
        self
    }

    pub fn random_features(mut self, on: bool) -> Self {
        self.random_features = Some(on);
        self
    }

    /// Estimation options and the forest configuration this estimator needs.
    pub fn resolve(&self, min_leaf_examples: usize) -> Result<(EstimatorOptions, TreeConfig)> {
        let reject = |what: &str| {
            Err(Error::Config(format!(
                "estimator {:?}: {what} cannot be set for {}",
                self.id,
                self.kind.name()
            )))
        };
        let (mut opts, rf_default) = match self.kind {
            EstimatorKind::Bpets => {
                if self.include_oob.is_some()
                    || self.smoothing.is_some()
                    || self.random_features.is_some()
                    || self.alpha.is_some()
                {
                    return reject("include_oob, smoothing, random_features or alpha");
                }
                (EstimatorOptions::bpets(), false)
            }
            EstimatorKind::Ebpets => {
                let opts = EstimatorOptions {
                    kind: EstimatorKind::Ebpets,
                    include_oob: self.include_oob.unwrap_or(true),
                    smoothing: self.smoothing.unwrap_or(Smoothing::Laplace),
                    ..EstimatorOptions::bpets()
                };
                (opts, false)
            }
            EstimatorKind::Mobesp => {
                if self.include_oob.is_some() || self.smoothing.is_some() {
                    return reject("include_oob or smoothing");
                }
                (EstimatorOptions::mobesp(), true)
            }
        };
        if let Some(a) = self.alpha {
            opts.alpha = a;
        }
        if self.m.is_some() {
            if opts.smoothing != Smoothing::MEstimate {
                return reject("m without m_estimate smoothing");
            }
            opts.m = self.m;
        }
        // Class-count checks only concern explicit priors, which are never set here.
        opts.validate(2)
            .map_err(|e| Error::Config(format!("estimator {:?}: {e}", self.id)))?;
        let tree = TreeConfig {
            min_leaf_examples,
            ..TreeConfig::default()
        }
        .with_random_features(self.random_features.unwrap_or(rf_default));
        tree.validate()?;
        Ok((opts, tree))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Comparison {
    pub baseline: String,
    pub challenger: String,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative dataset paths are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.trials < 2 {
            return fail(format!("trials must be at least 2, got {}", self.trials));
        }
        if self.trees == 0 {
            return fail("trees must be at least 1".into());
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return fail(format!(
                "test_fraction must lie in (0, 1), got {}",
                self.test_fraction
            ));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return fail(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            ));
        }
        if self.estimators.is_empty() {
            return fail("no estimators configured".into());
        }
        let mut ids = BTreeSet::new();
        for e in &self.estimators {
            if e.id.is_empty() || e.id.contains([',', '/', '\\']) {
                return fail(format!("invalid estimator id {:?}", e.id));
            }
            if !ids.insert(e.id.as_str()) {
                return fail(format!("duplicate estimator id {:?}", e.id));
            }
            e.resolve(self.min_leaf_examples)?;
        }
        let mut data_ids = BTreeSet::new();
        for d in &self.datasets {
            let id = d.id();
            if id.is_empty() || id.contains([',', '/', '\\']) {
                return fail(format!("invalid dataset id {id:?}"));
            }
            if !data_ids.insert(id.clone()) {
                return fail(format!("duplicate dataset id {id:?}"));
            }
        }
        for c in &self.comparisons {
            for id in [&c.baseline, &c.challenger] {
                if !ids.contains(id.as_str()) {
                    return fail(format!("comparison names unknown estimator {id:?}"));
                }
            }
        }
        Ok(())
    }

    /// The configured comparisons, or the first estimator against each of
    /// the others when none are given.
    pub fn effective_comparisons(&self) -> Vec<Comparison> {
        if !self.comparisons.is_empty() {
            return self.comparisons.clone();
        }
        let Some((first, rest)) = self.estimators.split_first() else {
            return Vec::new();
        };
        rest.iter()
            .map(|e| Comparison {
                baseline: first.id.clone(),
                challenger: e.id.clone(),
            })
            .collect()
    }
}
