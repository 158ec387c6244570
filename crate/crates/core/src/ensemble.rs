//! Bagged forests: stratified bootstrap per tree, majority voting, and the
//! out-of-bag classification of the training set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{stratified_bootstrap, BootstrapSample, Dataset};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;
use crate::seed;
use crate::tree::{argmax_lowest, grow_tree, Tree, TreeConfig};

/// `T` trees with the bootstrap replicates they were grown from.
///
/// Tree `t` uses the random stream `seed::tree_seed(master_seed, t)` for
/// both its bootstrap draw and its growth, so parallel and serial builds
/// produce identical forests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    trees: Vec<Tree>,
    samples: Vec<BootstrapSample>,
    config: TreeConfig,
    master_seed: u64,
    num_classes: usize,
    num_features: usize,
    train_len: usize,
    train_digest: String,
}

/// Out-of-bag ensemble classification of every training example.
#[derive(Debug, Clone, PartialEq)]
pub struct OobClassifications {
    pub predicted: Vec<usize>,
    /// Trees in which the example was out of bag; zero means the
    /// full-ensemble vote was used instead.
    pub oob_tree_counts: Vec<usize>,
}

impl OobClassifications {
    pub fn fallback_count(&self) -> usize {
        self.oob_tree_counts.iter().filter(|&&c| c == 0).count()
    }
}

/// Grows `num_trees` trees on independent stratified bootstrap replicates of
/// `train` and bins each tree's out-of-bag examples.
pub fn build_ensemble(
    train: &Dataset,
    num_trees: usize,
    config: &TreeConfig,
    master_seed: u64,
) -> Result<Ensemble> {
    if num_trees == 0 {
        return Err(Error::InvalidArgument(
            "ensemble needs at least one tree".into(),
        ));
    }
    config.validate()?;
    let (trees, samples): (Vec<Tree>, Vec<BootstrapSample>) = (0..num_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed::tree_seed(master_seed, t));
            let sample = stratified_bootstrap(train, &mut rng);
            let mut tree = grow_tree(&sample, train, config, &mut rng);
            tree.bin_out_of_bag(&sample, train);
            (tree, sample)
        })
        .unzip();
    Ok(Ensemble {
        trees,
        samples,
        config: config.clone(),
        master_seed,
        num_classes: train.num_classes(),
        num_features: train.num_features(),
        train_len: train.len(),
        train_digest: train.digest(),
    })
}

impl Ensemble {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn samples(&self) -> &[BootstrapSample] {
        &self.samples
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    /// Digest of the training set the forest was grown on.
    pub fn train_digest(&self) -> &str {
        &self.train_digest
    }

    pub(crate) fn check_row(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_features {
            return Err(Error::DimensionMismatch {
                expected: self.num_features,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Trees in which training example `i` is out of bag.
    pub fn oob_trees(&self, i: usize) -> Vec<usize> {
        (0..self.trees.len())
            .filter(|&t| self.samples[t].is_out_of_bag(i))
            .collect()
    }

    /// Majority vote of all trees; ties go to the lowest class index.
    pub fn majority_vote(&self, x: &[f64]) -> Result<usize> {
        self.check_row(x)?;
        Ok(self.vote_unchecked(x))
    }

    pub(crate) fn vote_unchecked(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.num_classes];
        for tree in &self.trees {
            votes[tree.vote(x)] += 1;
        }
        argmax_lowest(&votes)
    }

    /// Majority vote restricted to `tree_ids`.
    pub fn vote_on_subset(&self, x: &[f64], tree_ids: &[usize]) -> Result<usize> {
        self.check_row(x)?;
        if tree_ids.is_empty() {
            return Err(Error::EmptyTreeSubset);
        }
        let mut votes = vec![0usize; self.num_classes];
        for &t in tree_ids {
            let tree = self
                .trees
                .get(t)
                .ok_or_else(|| Error::InvalidArgument(format!("tree id {t} out of range")))?;
            votes[tree.vote(x)] += 1;
        }
        Ok(argmax_lowest(&votes))
    }

    /// Classifies each training example by the trees that did not see it.
    /// Examples with no out-of-bag tree fall back to the full-ensemble vote.
    pub fn oob_classify_training_set(&self, train: &Dataset) -> Result<OobClassifications> {
        self.check_train(train)?;
        let n = train.len();
        let mut votes = vec![vec![0usize; self.num_classes]; n];
        let mut oob_tree_counts = vec![0usize; n];
        for (tree, sample) in self.trees.iter().zip(&self.samples) {
            for &i in &sample.out_bag {
                votes[i][tree.vote(train.row(i))] += 1;
                oob_tree_counts[i] += 1;
            }
        }
        let predicted = votes
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if oob_tree_counts[i] == 0 {
                    self.vote_unchecked(train.row(i))
                } else {
                    argmax_lowest(v)
                }
            })
            .collect();
        Ok(OobClassifications {
            predicted,
            oob_tree_counts,
        })
    }

    /// Fails unless `train` is the dataset this forest was grown on.
    pub fn check_train(&self, train: &Dataset) -> Result<()> {
        if train.len() != self.train_len
            || train.num_features() != self.num_features
            || train.num_classes() != self.num_classes
            || train.digest() != self.train_digest
        {
            return Err(Error::ModelMismatch(
                "dataset is not the training set of this ensemble".into(),
            ));
        }
        Ok(())
    }

    /// Identity digest over the grown structure and bins.
    pub fn digest(&self) -> String {
        let mut fp = Fingerprint::new("ensemble");
        fp.usize(self.trees.len()).str(&self.train_digest);
        for tree in &self.trees {
            tree.fingerprint(&mut fp);
        }
        fp.finish()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.trees.is_empty() || self.trees.len() != self.samples.len() {
            return Err(Error::CorruptModel("tree and sample counts differ".into()));
        }
        for (t, (tree, sample)) in self.trees.iter().zip(&self.samples).enumerate() {
            tree.validate(self.num_classes, self.num_features)?;
            if sample.in_bag.len() != self.train_len
                || sample
                    .in_bag
                    .iter()
                    .chain(&sample.out_bag)
                    .any(|&i| i >= self.train_len)
            {
                return Err(Error::CorruptModel(format!(
                    "bootstrap sample {t} out of range"
                )));
            }
        }
        Ok(())
    }
}
