//! A fitted estimator and its on-disk format.
//!
//! Model files are JSON documents:
//!
//! ```text
//! {
//!   "format": "petforest-model",
//!   "version": 1,
//!   "seed_scheme": "...",          // how per-tree seeds derive from master_seed
//!   "class_names": [...],          // original label strings, index = class id
//!   "feature_names": [...] | null,
//!   "options": EstimatorOptions,
//!   "ensemble": {
//!     "trees": [{ "nodes": [...], "leaves": [LeafBins], ... }],
//!     "samples": [{ "in_bag": [...], "out_bag": [...] }],
//!     "config": TreeConfig, "master_seed": u64, ...
//!   },
//!   "matrices": MobespMatrices | null
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so a loaded model
//! predicts bit-identically to the saved one.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::ensemble::{build_ensemble, Ensemble};
use crate::error::{Error, Result};
use crate::estimators::{
    self, build_mobesp_matrices, EstimatorKind, EstimatorOptions, MobespMatrices, ProbEstimate,
};
use crate::seed::SEED_SCHEME;
use crate::tree::TreeConfig;

pub const MODEL_FORMAT: &str = "petforest-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub ensemble: Ensemble,
    pub options: EstimatorOptions,
    pub matrices: Option<MobespMatrices>,
    pub class_names: Vec<String>,
    pub feature_names: Option<Vec<String>>,
}

impl Model {
    /// Builds the forest and, for MOB-ESP, the out-of-bag classifications
    /// and leaf matrices.
    pub fn fit(
        train: &Dataset,
        num_trees: usize,
        tree_config: &TreeConfig,
        options: EstimatorOptions,
        master_seed: u64,
    ) -> Result<Model> {
        let ensemble = build_ensemble(train, num_trees, tree_config, master_seed)?;
        Self::from_ensemble(ensemble, train, options)
    }

    /// Wraps an already built forest; `train` must be its training set.
    pub fn from_ensemble(
        ensemble: Ensemble,
        train: &Dataset,
        options: EstimatorOptions,
    ) -> Result<Model> {
        options.validate(train.num_classes())?;
        let matrices = if options.kind == EstimatorKind::Mobesp {
            let oob = ensemble.oob_classify_training_set(train)?;
            Some(build_mobesp_matrices(&ensemble, train, &oob, &options)?)
        } else {
            None
        };
        Ok(Model {
            ensemble,
            options,
            matrices,
            class_names: train.class_names().to_vec(),
            feature_names: train.feature_names().map(<[String]>::to_vec),
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_features(&self) -> usize {
        self.ensemble.num_features()
    }

    pub fn predict(&self, x: &[f64]) -> Result<ProbEstimate> {
        estimators::predict(&self.ensemble, &self.options, self.matrices.as_ref(), x)
    }

    pub fn predict_rows<'a>(
        &self,
        rows: impl IntoIterator<Item = &'a [f64]>,
    ) -> Result<Vec<ProbEstimate>> {
        rows.into_iter().map(|x| self.predict(x)).collect()
    }

    /// Fails unless `d` has this model's feature count and class names.
    pub fn check_dataset(&self, d: &Dataset) -> Result<()> {
        if d.num_features() != self.num_features() {
            return Err(Error::ModelMismatch(format!(
                "model expects {} features, data has {}",
                self.num_features(),
                d.num_features()
            )));
        }
        if d.class_names() != self.class_names.as_slice() {
            return Err(Error::ModelMismatch(format!(
                "model classes {:?} (K={}), data classes {:?} (K={})",
                self.class_names,
                self.num_classes(),
                d.class_names(),
                d.num_classes()
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        serialize_model(self, path)
    }

    pub fn load(path: &Path) -> Result<Model> {
        deserialize_model(path)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    seed_scheme: String,
    class_names: Vec<String>,
    feature_names: Option<Vec<String>>,
    options: EstimatorOptions,
    ensemble: Ensemble,
    matrices: Option<MobespMatrices>,
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format: &'a str,
    version: u32,
    seed_scheme: &'a str,
    class_names: &'a [String],
    feature_names: &'a Option<Vec<String>>,
    options: &'a EstimatorOptions,
    ensemble: &'a Ensemble,
    matrices: &'a Option<MobespMatrices>,
}

pub fn write_model<W: Write>(model: &Model, writer: W) -> Result<()> {
    let file = ModelFileRef {
        format: MODEL_FORMAT,
        version: MODEL_VERSION,
        seed_scheme: SEED_SCHEME,
        class_names: &model.class_names,
        feature_names: &model.feature_names,
        options: &model.options,
        ensemble: &model.ensemble,
        matrices: &model.matrices,
    };
    serde_json::to_writer(writer, &file).map_err(|e| Error::Io(e.into()))
}

pub fn read_model<R: Read>(mut reader: R) -> Result<Model> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::CorruptModel(e.to_string()))?;
    if value.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
        return Err(Error::CorruptModel("not a model file".into()));
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::CorruptModel("missing version".into()))?;
    if version != u64::from(MODEL_VERSION) {
        return Err(Error::ModelVersion {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: MODEL_VERSION,
        });
    }
    let file: ModelFile =
        serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))?;
    let model = Model {
        ensemble: file.ensemble,
        options: file.options,
        matrices: file.matrices,
        class_names: file.class_names,
        feature_names: file.feature_names,
    };
    model.ensemble.validate()?;
    if model.class_names.len() != model.ensemble.num_classes() {
        return Err(Error::CorruptModel(
            "class names do not match the forest".into(),
        ));
    }
    model
        .options
        .validate(model.num_classes())
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    match (&model.matrices, model.options.kind) {
        (Some(m), EstimatorKind::Mobesp) => m.validate_for(&model.ensemble)?,
        (None, EstimatorKind::Mobesp) => {
            return Err(Error::CorruptModel("MOB-ESP model without matrices".into()))
        }
        _ => {}
    }
    Ok(model)
}

pub fn serialize_model(model: &Model, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    let mut w = BufWriter::new(file);
    write_model(model, &mut w)?;
    w.flush().map_err(|e| Error::file(path, e))
}

pub fn deserialize_model(path: &Path) -> Result<Model> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_model(std::io::BufReader::new(file))
}
