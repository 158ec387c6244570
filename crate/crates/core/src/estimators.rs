//! Class-probability estimation from a grown forest.
//!
//! * B-PETs: Laplace-smoothed in-bag leaf frequencies averaged over trees.
//! * EB-PETs: leaf frequencies that add out-of-bag counts weighted by
//!   `alpha`, optionally unsmoothed. Random feature selection, the third
//!   enhancement, is a build-time option on [`TreeConfig`](crate::TreeConfig).
//! * MOB-ESP: every leaf holds a `K x K` matrix of true-class frequencies of
//!   its in-bag and out-of-bag members, split by the members' out-of-bag
//!   ensemble classification. A query is classified by the ensemble, and the
//!   matching column of each reached leaf is averaged over trees.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::ensemble::{Ensemble, OobClassifications};
use crate::error::{Error, Result};
use crate::tree::{argmax_lowest, LeafBins};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Bpets,
    Ebpets,
    Mobesp,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Bpets => "bpets",
            EstimatorKind::Ebpets => "ebpets",
            EstimatorKind::Mobesp => "mobesp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    Laplace,
    MEstimate,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub kind: EstimatorKind,
    /// Add out-of-bag leaf counts to the in-bag counts (EB-PETs).
    pub include_oob: bool,
    pub smoothing: Smoothing,
    /// M-estimate strength; defaults to `K`.
    pub m: Option<f64>,
    /// M-estimate base rates; default uniform `1/K`.
    pub priors: Option<Vec<f64>>,
    /// Weight of out-of-bag examples (EB-PETs leaf counts and MOB-ESP
    /// matrices).
    pub alpha: f64,
}

impl EstimatorOptions {
    pub fn bpets() -> Self {
        EstimatorOptions {
            kind: EstimatorKind::Bpets,
            include_oob: false,
            smoothing: Smoothing::Laplace,
            m: None,
            priors: None,
            alpha: 1.0,
        }
    }

    /// EB-PETs with out-of-bag counts and no smoothing.
    pub fn ebpets() -> Self {
        EstimatorOptions {
            kind: EstimatorKind::Ebpets,
            include_oob: true,
            smoothing: Smoothing::None,
            ..Self::bpets()
        }
    }

    pub fn mobesp() -> Self {
        EstimatorOptions {
            kind: EstimatorKind::Mobesp,
            include_oob: true,
            smoothing: Smoothing::None,
            ..Self::bpets()
        }
    }

    pub fn validate(&self, num_classes: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.kind == EstimatorKind::Bpets
            && (self.include_oob || self.smoothing != Smoothing::Laplace)
        {
            return bad("B-PETs uses Laplace smoothing on in-bag counts only".into());
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!(
                "alpha must be a finite value >= 0, got {}",
                self.alpha
            ));
        }
        if let Some(m) = self.m {
            if !(m >= 0.0 && m.is_finite()) {
                return bad(format!("m must be a finite value >= 0, got {m}"));
            }
        }
        if let Some(p) = &self.priors {
            if p.len() != num_classes {
                return bad(format!("{} priors for {num_classes} classes", p.len()));
            }
            if p.iter().any(|&v| !(0.0..=1.0).contains(&v))
                || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9
            {
                return bad("priors must lie in [0, 1] and sum to 1".into());
            }
        }
        Ok(())
    }
}

/// Class probabilities for one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub probs: Vec<f64>,
    /// The ensemble's majority vote for the example.
    pub predicted_class: usize,
}

impl ProbEstimate {
    /// Highest-probability class; ties go to the lowest index.
    pub fn argmax_class(&self) -> usize {
        argmax_lowest(&self.probs)
    }
}

/// `(n_k + 1) / (n + K)`.
pub fn laplace_estimate(n_k: usize, n: usize, num_classes: usize) -> Result<f64> {
    if n_k > n {
        return Err(Error::InconsistentCounts(format!(
            "n_k = {n_k} exceeds n = {n}"
        )));
    }
    Ok((n_k + 1) as f64 / (n + num_classes) as f64)
}

/// `(n_k + p_k m) / (n + m)`.
pub fn m_estimate(n_k: usize, n: usize, p_k: f64, m: f64) -> Result<f64> {
    if n_k > n {
        return Err(Error::InconsistentCounts(format!(
            "n_k = {n_k} exceeds n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_k) || m.is_nan() || m < 0.0 {
        return Err(Error::InvalidArgument(format!("p_k = {p_k}, m = {m}")));
    }
    let den = n as f64 + m;
    if den == 0.0 {
        return Err(Error::EmptyCounts);
    }
    Ok((n_k as f64 + p_k * m) / den)
}

/// Leaf estimate from in-bag counts plus `alpha`-weighted out-of-bag counts
/// (the out-of-bag weight is zero unless `include_oob`).
pub fn ebpets_leaf_estimate(bins: &LeafBins, opts: &EstimatorOptions) -> Result<Vec<f64>> {
    let mut out = vec![0.0; bins.ib_counts.len()];
    ebpets_leaf_into(bins, opts, &mut out)?;
    Ok(out)
}

fn ebpets_leaf_into(bins: &LeafBins, opts: &EstimatorOptions, out: &mut [f64]) -> Result<()> {
    let k = bins.ib_counts.len();
    let w = if opts.include_oob { opts.alpha } else { 0.0 };
    let total = bins.n_ib() as f64 + w * bins.n_ob() as f64;
    let count = |c: usize| bins.ib_counts[c] as f64 + w * bins.ob_counts[c] as f64;
    match opts.smoothing {
        Smoothing::Laplace => {
            let den = total + k as f64;
            for (c, o) in out.iter_mut().enumerate() {
                *o = (count(c) + 1.0) / den;
            }
        }
        Smoothing::MEstimate => {
            let m = opts.m.unwrap_or(k as f64);
            let den = total + m;
            if den <= 0.0 {
                return Err(Error::EmptyCounts);
            }
            for (c, o) in out.iter_mut().enumerate() {
                let p = opts.priors.as_ref().map_or(1.0 / k as f64, |p| p[c]);
                *o = (count(c) + p * m) / den;
            }
        }
        Smoothing::None => {
            if total <= 0.0 {
                return Err(Error::EmptyCounts);
            }
            for (c, o) in out.iter_mut().enumerate() {
                *o = count(c) / total;
            }
        }
    }
    Ok(())
}

/// Average of the trees' Laplace estimates on in-bag counts.
pub fn bpets_predict(e: &Ensemble, x: &[f64]) -> Result<ProbEstimate> {
    e.check_row(x)?;
    let k = e.num_classes();
    let mut sums = vec![0.0; k];
    let mut votes = vec![0usize; k];
    for tree in e.trees() {
        let bins = tree.leaf(tree.leaf_index(x));
        let n = bins.n_ib();
        for (c, s) in sums.iter_mut().enumerate() {
            *s += laplace_estimate(bins.ib_counts[c], n, k)?;
        }
        votes[argmax_lowest(&bins.ib_counts)] += 1;
    }
    Ok(average(sums, e.num_trees(), argmax_lowest(&votes)))
}

/// Average of [`ebpets_leaf_estimate`] over all trees.
pub fn ebpets_predict(e: &Ensemble, x: &[f64], opts: &EstimatorOptions) -> Result<ProbEstimate> {
    e.check_row(x)?;
    let k = e.num_classes();
    let mut sums = vec![0.0; k];
    let mut leaf = vec![0.0; k];
    let mut votes = vec![0usize; k];
    for tree in e.trees() {
        let bins = tree.leaf(tree.leaf_index(x));
        ebpets_leaf_into(bins, opts, &mut leaf)?;
        sums.iter_mut().zip(&leaf).for_each(|(s, p)| *s += p);
        votes[argmax_lowest(&bins.ib_counts)] += 1;
    }
    Ok(average(sums, e.num_trees(), argmax_lowest(&votes)))
}

fn average(mut sums: Vec<f64>, count: usize, predicted_class: usize) -> ProbEstimate {
    let n = count as f64;
    sums.iter_mut().for_each(|s| *s /= n);
    ProbEstimate {
        probs: sums,
        predicted_class,
    }
}

/// Conditional class distributions of one leaf, one column per ensemble
/// classification `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafMatrix {
    /// Column-major `K x K`: entry `(k, j)` at `j * K + k` is the estimated
    /// probability of class `k` given classification `j`.
    pub probs: Vec<f64>,
    /// `M^IB + alpha * M^OB` per column; zero marks an empty column.
    pub support: Vec<f64>,
}

impl LeafMatrix {
    pub fn num_classes(&self) -> usize {
        self.support.len()
    }

    /// Column `j`, or `None` when no member was classified as `j`.
    pub fn column(&self, j: usize) -> Option<&[f64]> {
        let k = self.num_classes();
        (self.support[j] > 0.0).then(|| &self.probs[j * k..(j + 1) * k])
    }
}

/// Per-tree, per-leaf conditional matrices of a MOB-ESP model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobespMatrices {
    pub alpha: f64,
    pub num_classes: usize,
    /// `leaves[t][l]` is the matrix of leaf `l` in tree `t`.
    pub leaves: Vec<Vec<LeafMatrix>>,
}

impl MobespMatrices {
    pub fn leaf(&self, tree: usize, leaf: usize) -> &LeafMatrix {
        &self.leaves[tree][leaf]
    }

    pub(crate) fn validate_for(&self, e: &Ensemble) -> Result<()> {
        let k = self.num_classes;
        let ok = k == e.num_classes()
            && self.leaves.len() == e.num_trees()
            && self.leaves.iter().zip(e.trees()).all(|(ms, t)| {
                ms.len() == t.num_leaves()
                    && ms
                        .iter()
                        .all(|m| m.probs.len() == k * k && m.support.len() == k)
            });
        if ok {
            Ok(())
        } else {
            Err(Error::CorruptModel(
                "MOB-ESP matrices do not match the forest".into(),
            ))
        }
    }
}

/// Builds every leaf's matrix from its in-bag and out-of-bag members, the
/// members' true classes and their out-of-bag classifications `oob`. The
/// out-of-bag weight is `opts.alpha`.
pub fn build_mobesp_matrices(
    e: &Ensemble,
    train: &Dataset,
    oob: &OobClassifications,
    opts: &EstimatorOptions,
) -> Result<MobespMatrices> {
    e.check_train(train)?;
    if oob.predicted.len() != train.len() {
        return Err(Error::InvalidArgument(
            "out-of-bag classifications do not cover the training set".into(),
        ));
    }
    let k = e.num_classes();
    let alpha = opts.alpha;
    let leaves = e
        .trees()
        .iter()
        .map(|tree| {
            tree.leaves()
                .iter()
                .map(|bins| {
                    // counts[j * k + c]: members classified j whose true class is c.
                    let mut ib = vec![0usize; k * k];
                    let mut ob = vec![0usize; k * k];
                    for &i in &bins.ib_members {
                        ib[oob.predicted[i] * k + train.label(i)] += 1;
                    }
                    for &i in &bins.ob_members {
                        ob[oob.predicted[i] * k + train.label(i)] += 1;
                    }
                    conditional_matrix(&ib, &ob, k, alpha)
                })
                .collect()
        })
        .collect();
    Ok(MobespMatrices {
        alpha,
        num_classes: k,
        leaves,
    })
}

fn conditional_matrix(ib: &[usize], ob: &[usize], k: usize, alpha: f64) -> LeafMatrix {
    let mut probs = vec![0.0; k * k];
    let mut support = vec![0.0; k];
    for j in 0..k {
        let col = j * k..(j + 1) * k;
        let m_ib: usize = ib[col.clone()].iter().sum();
        let m_ob: usize = ob[col.clone()].iter().sum();
        let den = m_ib as f64 + alpha * m_ob as f64;
        if den > 0.0 {
            support[j] = den;
            for c in 0..k {
                probs[j * k + c] = (ib[j * k + c] as f64 + alpha * ob[j * k + c] as f64) / den;
            }
        }
    }
    LeafMatrix { probs, support }
}

/// MOB-ESP estimate: classify `x` by majority vote `j`, then average column
/// `j` of the reached leaf's matrix over the trees where it is nonempty.
/// If every such column is empty, the unsmoothed in-bag plus out-of-bag
/// leaf frequencies are averaged instead.
pub fn mobesp_predict(e: &Ensemble, mats: &MobespMatrices, x: &[f64]) -> Result<ProbEstimate> {
    e.check_row(x)?;
    let k = e.num_classes();
    let leaf_ids: Vec<usize> = e.trees().iter().map(|t| t.leaf_index(x)).collect();
    let mut votes = vec![0usize; k];
    for (tree, &l) in e.trees().iter().zip(&leaf_ids) {
        votes[argmax_lowest(&tree.leaf(l).ib_counts)] += 1;
    }
    let j = argmax_lowest(&votes);

    let mut sums = vec![0.0; k];
    let mut used = 0;
    for (t, &l) in leaf_ids.iter().enumerate() {
        if let Some(col) = mats.leaf(t, l).column(j) {
            sums.iter_mut().zip(col).for_each(|(s, p)| *s += p);
            used += 1;
        }
    }
    if used > 0 {
        return Ok(average(sums, used, j));
    }

    let fallback = EstimatorOptions {
        alpha: mats.alpha,
        ..EstimatorOptions::mobesp()
    };
    let mut leaf = vec![0.0; k];
    for (tree, &l) in e.trees().iter().zip(&leaf_ids) {
        ebpets_leaf_into(tree.leaf(l), &fallback, &mut leaf)?;
        sums.iter_mut().zip(&leaf).for_each(|(s, p)| *s += p);
    }
    Ok(average(sums, e.num_trees(), j))
}

/// Estimate for `x` under `opts`; MOB-ESP needs the matrices built for `e`.
pub fn predict(
    e: &Ensemble,
    opts: &EstimatorOptions,
    mats: Option<&MobespMatrices>,
    x: &[f64],
) -> Result<ProbEstimate> {
    match (opts.kind, mats) {
        (EstimatorKind::Bpets, _) => bpets_predict(e, x),
        (EstimatorKind::Ebpets, _) => ebpets_predict(e, x, opts),
        (EstimatorKind::Mobesp, Some(m)) => mobesp_predict(e, m, x),
        (EstimatorKind::Mobesp, None) => {
            Err(Error::InvalidArgument("MOB-ESP needs leaf matrices".into()))
        }
    }
}
