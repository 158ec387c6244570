//! Unpruned C4.5-style decision trees grown on bootstrap replicates.
//!
//! Splits are binary numeric tests `x[attribute] <= threshold` chosen by
//! information gain, with thresholds at midpoints between consecutive
//! distinct values. Growth stops when a node is pure or no admissible split
//! has positive gain; a split is admissible only if both children keep at
//! least `min_leaf_examples` in-bag draws. Leaves keep the in-bag draws that
//! built them and, after [`Tree::bin_out_of_bag`], the out-of-bag examples
//! routed to them.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{BootstrapSample, Dataset};
use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

/// Gains within this distance are treated as tied, and a split must gain
/// more than this to be accepted.
pub const GAIN_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub min_leaf_examples: usize,
    /// Evaluate a random attribute subset at every node.
    pub random_features: bool,
    /// Overrides the subset size `ceil(sqrt(D))`.
    pub feature_subset_size: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_leaf_examples: 2,
            random_features: false,
            feature_subset_size: None,
        }
    }
}

impl TreeConfig {
    pub fn with_random_features(mut self, on: bool) -> Self {
        self.random_features = on;
        self
    }

    /// Number of attributes examined at each node for a `D`-feature dataset.
    pub fn features_per_node(&self, num_features: usize) -> usize {
        if !self.random_features {
            return num_features;
        }
        self.feature_subset_size
            .unwrap_or_else(|| ceil_sqrt(num_features))
            .clamp(1, num_features.max(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_leaf_examples == 0 {
            return Err(Error::InvalidArgument(
                "min_leaf_examples must be at least 1".into(),
            ));
        }
        if self.feature_subset_size == Some(0) {
            return Err(Error::InvalidArgument(
                "feature_subset_size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Smallest `d` with `d * d >= n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut d = (n as f64).sqrt() as usize;
    while d * d < n {
        d += 1;
    }
    while d > 0 && (d - 1) * (d - 1) >= n {
        d -= 1;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitTest {
    pub attribute: usize,
    pub threshold: f64,
}

impl SplitTest {
    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        x[self.attribute] <= self.threshold
    }
}

/// Class counts and member lists of one leaf. In-bag members repeat once per
/// bootstrap draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafBins {
    pub ib_counts: Vec<usize>,
    pub ob_counts: Vec<usize>,
    pub ib_members: Vec<usize>,
    pub ob_members: Vec<usize>,
}

impl LeafBins {
    fn from_members(ib_members: Vec<usize>, train: &Dataset) -> Self {
        let k = train.num_classes();
        let mut ib_counts = vec![0; k];
        ib_members
            .iter()
            .for_each(|&i| ib_counts[train.label(i)] += 1);
        LeafBins {
            ib_counts,
            ob_counts: vec![0; k],
            ib_members,
            ob_members: Vec::new(),
        }
    }

    pub fn n_ib(&self) -> usize {
        self.ib_counts.iter().sum()
    }

    pub fn n_ob(&self) -> usize {
        self.ob_counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Split {
        test: SplitTest,
        left: usize,
        right: usize,
    },
    Leaf {
        leaf: usize,
    },
}

/// A grown tree: node arena rooted at index 0, plus leaf bins indexed by
/// leaf id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
    leaves: Vec<LeafBins>,
    num_classes: usize,
    num_features: usize,
}

/// Shannon entropy in bits of a class-count vector.
pub fn entropy(class_counts: &[usize]) -> Result<f64> {
    let total: usize = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok(entropy_of(class_counts, total))
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

/// `H(parent) - |L|/|P| H(left) - |R|/|P| H(right)`.
pub fn information_gain(parent: &[usize], left: &[usize], right: &[usize]) -> Result<f64> {
    if parent.len() != left.len() || parent.len() != right.len() {
        return Err(Error::InconsistentCounts(
            "class vectors differ in length".into(),
        ));
    }
    if parent
        .iter()
        .zip(left)
        .zip(right)
        .any(|((p, l), r)| l + r != *p)
    {
        return Err(Error::InconsistentCounts(format!(
            "{left:?} + {right:?} != {parent:?}"
        )));
    }
    let (nl, nr) = (left.iter().sum::<usize>(), right.iter().sum::<usize>());
    if nl == 0 || nr == 0 {
        return Err(Error::InconsistentCounts(
            "both children must be nonempty".into(),
        ));
    }
    Ok(gain_of(entropy_of(parent, nl + nr), left, nl, right, nr))
}

fn gain_of(parent_entropy: f64, left: &[usize], nl: usize, right: &[usize], nr: usize) -> f64 {
    let n = (nl + nr) as f64;
    parent_entropy
        - (nl as f64 / n) * entropy_of(left, nl)
        - (nr as f64 / n) * entropy_of(right, nr)
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = 0.5 * a + 0.5 * b;
    // Adjacent floats can round the midpoint onto `b`, which would route `b` left.
    if m >= a && m < b {
        m
    } else {
        a
    }
}

/// Midpoints between consecutive distinct values. Fewer than two distinct
/// values yield no thresholds.
pub fn candidate_thresholds(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| midpoint(w[0], w[1])).collect()
}

fn class_counts(train: &Dataset, examples: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; train.num_classes()];
    examples.iter().for_each(|&i| counts[train.label(i)] += 1);
    counts
}

fn is_pure(counts: &[usize]) -> bool {
    counts.iter().filter(|&&c| c > 0).count() <= 1
}

/// Best admissible split over the attributes examined at this node.
///
/// With random features on, `config.features_per_node(D)` attributes are
/// drawn without replacement; otherwise all are examined. Gain ties are
/// broken uniformly at random, first among attributes, then among that
/// attribute's tied thresholds. Returns `None` when no admissible split
/// gains more than [`GAIN_EPSILON`].
pub fn choose_split<R: Rng + ?Sized>(
    train: &Dataset,
    examples: &[usize],
    config: &TreeConfig,
    rng: &mut R,
) -> Option<SplitTest> {
    let n = examples.len();
    let min_leaf = config.min_leaf_examples.max(1);
    let parent = class_counts(train, examples);
    if n < 2 * min_leaf || is_pure(&parent) {
        return None;
    }
    let num_features = train.num_features();
    let attributes: Vec<usize> = if config.random_features {
        index::sample(rng, num_features, config.features_per_node(num_features)).into_vec()
    } else {
        (0..num_features).collect()
    };

    let k = train.num_classes();
    let parent_entropy = entropy_of(&parent, n);
    let mut best_gain = f64::NEG_INFINITY;
    let mut tied: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(n);
    let mut left = vec![0usize; k];
    let mut right = vec![0usize; k];

    for &attribute in &attributes {
        column.clear();
        column.extend(
            examples
                .iter()
                .map(|&i| (train.row(i)[attribute], train.label(i))),
        );
        column.sort_by(|a, b| a.0.total_cmp(&b.0));
        left.iter_mut().for_each(|c| *c = 0);
        right.copy_from_slice(&parent);

        let mut attr_gain = f64::NEG_INFINITY;
        let mut attr_thresholds: Vec<f64> = Vec::new();
        for i in 0..n - 1 {
            let (value, label) = column[i];
            left[label] += 1;
            right[label] -= 1;
            let next = column[i + 1].0;
            let nl = i + 1;
            if value == next || nl < min_leaf || n - nl < min_leaf {
                continue;
            }
            let gain = gain_of(parent_entropy, &left, nl, &right, n - nl);
            if gain <= GAIN_EPSILON {
                continue;
            }
            if gain > attr_gain + GAIN_EPSILON {
                attr_gain = gain;
                attr_thresholds.clear();
                attr_thresholds.push(midpoint(value, next));
            } else if gain >= attr_gain - GAIN_EPSILON {
                attr_thresholds.push(midpoint(value, next));
            }
        }
        if attr_thresholds.is_empty() {
            continue;
        }
        if attr_gain > best_gain + GAIN_EPSILON {
            best_gain = attr_gain;
            tied.clear();
            tied.push((attribute, attr_thresholds));
        } else if attr_gain >= best_gain - GAIN_EPSILON {
            tied.push((attribute, attr_thresholds));
        }
    }

    if tied.is_empty() {
        return None;
    }
    let (attribute, thresholds) = &tied[pick(rng, tied.len())];
    let threshold = thresholds[pick(rng, thresholds.len())];
    Some(SplitTest {
        attribute: *attribute,
        threshold,
    })
}

fn pick<R: Rng + ?Sized>(rng: &mut R, len: usize) -> usize {
    if len == 1 {
        0
    } else {
        rng.random_range(0..len)
    }
}

/// Grows a tree on the in-bag draws of `sample`. Out-of-bag bins are left
/// empty; see [`Tree::bin_out_of_bag`].
pub fn grow_tree<R: Rng + ?Sized>(
    sample: &BootstrapSample,
    train: &Dataset,
    config: &TreeConfig,
    rng: &mut R,
) -> Tree {
    let placeholder = Node::Leaf { leaf: usize::MAX };
    let mut nodes = vec![placeholder.clone()];
    let mut leaves = Vec::new();
    let mut stack = vec![(0usize, sample.in_bag.clone())];
    while let Some((slot, examples)) = stack.pop() {
        let split = if is_pure(&class_counts(train, &examples)) {
            None
        } else {
            choose_split(train, &examples, config, rng)
        };
        match split {
            Some(test) => {
                let (l, r): (Vec<usize>, Vec<usize>) = examples
                    .iter()
                    .partition(|&&i| test.goes_left(train.row(i)));
                let left = nodes.len();
                nodes.push(placeholder.clone());
                nodes.push(placeholder.clone());
                nodes[slot] = Node::Split {
                    test,
                    left,
                    right: left + 1,
                };
                stack.push((left + 1, r));
                stack.push((left, l));
            }
            None => {
                nodes[slot] = Node::Leaf { leaf: leaves.len() };
                leaves.push(LeafBins::from_members(examples, train));
            }
        }
    }
    Tree {
        nodes,
        leaves,
        num_classes: train.num_classes(),
        num_features: train.num_features(),
    }
}

/// Majority class of the in-bag counts; ties go to the lowest class index.
pub fn leaf_majority_class(bins: &LeafBins) -> Result<usize> {
    if bins.n_ib() == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok(argmax_lowest(&bins.ib_counts))
}

pub(crate) fn argmax_lowest<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

impl Tree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaves(&self) -> &[LeafBins] {
        &self.leaves
    }

    #[cfg(test)]
    pub(crate) fn leaves_mut(&mut self) -> &mut [LeafBins] {
        &mut self.leaves
    }

    pub fn leaf(&self, id: usize) -> &LeafBins {
        &self.leaves[id]
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    /// Leaf id reached by `x`.
    pub fn route_to_leaf(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.num_features {
            return Err(Error::DimensionMismatch {
                expected: self.num_features,
                found: x.len(),
            });
        }
        Ok(self.leaf_index(x))
    }

    #[inline]
    pub(crate) fn leaf_index(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split { test, left, right } => {
                    at = if test.goes_left(x) { *left } else { *right };
                }
                Node::Leaf { leaf } => return *leaf,
            }
        }
    }

    /// Class voted by the leaf `x` reaches.
    pub(crate) fn vote(&self, x: &[f64]) -> usize {
        argmax_lowest(&self.leaves[self.leaf_index(x)].ib_counts)
    }

    /// Routes every out-of-bag example of `sample` and records it in the
    /// leaf it reaches, replacing any previous out-of-bag bins.
    pub fn bin_out_of_bag(&mut self, sample: &BootstrapSample, train: &Dataset) {
        for leaf in &mut self.leaves {
            leaf.ob_counts.iter_mut().for_each(|c| *c = 0);
            leaf.ob_members.clear();
        }
        for &i in &sample.out_bag {
            let id = self.leaf_index(train.row(i));
            let leaf = &mut self.leaves[id];
            leaf.ob_counts[train.label(i)] += 1;
            leaf.ob_members.push(i);
        }
    }

    pub(crate) fn fingerprint(&self, fp: &mut Fingerprint) {
        fp.usize(self.nodes.len());
        for node in &self.nodes {
            match node {
                Node::Split { test, left, right } => {
                    fp.usize(test.attribute)
                        .f64(test.threshold)
                        .usize(*left)
                        .usize(*right);
                }
                Node::Leaf { leaf } => {
                    fp.usize(usize::MAX).usize(*leaf);
                }
            }
        }
        for leaf in &self.leaves {
            fp.usizes(&leaf.ib_counts).usizes(&leaf.ob_counts);
        }
    }

    /// Structural checks for trees read from disk.
    pub(crate) fn validate(&self, num_classes: usize, num_features: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::CorruptModel(msg));
        if self.num_classes != num_classes || self.num_features != num_features {
            return bad("tree dimensions differ from the model header".into());
        }
        if self.nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        let mut leaf_seen = vec![false; self.leaves.len()];
        let mut node_seen = vec![false; self.nodes.len()];
        let mut stack = vec![0usize];
        while let Some(at) = stack.pop() {
            if at >= self.nodes.len() || std::mem::replace(&mut node_seen[at], true) {
                return bad(format!("node {at} out of range or reachable twice"));
            }
            match &self.nodes[at] {
                Node::Split { test, left, right } => {
                    if test.attribute >= num_features || !test.threshold.is_finite() {
                        return bad(format!("invalid split at node {at}"));
                    }
                    stack.push(*right);
                    stack.push(*left);
                }
                Node::Leaf { leaf } => {
                    if *leaf >= self.leaves.len() || std::mem::replace(&mut leaf_seen[*leaf], true)
                    {
                        return bad(format!("leaf {leaf} out of range or shared"));
                    }
                }
            }
        }
        if node_seen.contains(&false) || leaf_seen.contains(&false) {
            return bad("unreachable nodes or leaves".into());
        }
        for (id, leaf) in self.leaves.iter().enumerate() {
            if leaf.ib_counts.len() != num_classes
                || leaf.ob_counts.len() != num_classes
                || leaf.n_ib() != leaf.ib_members.len()
                || leaf.n_ob() != leaf.ob_members.len()
                || leaf.n_ib() == 0
            {
                return bad(format!("inconsistent bins in leaf {id}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::stratified_bootstrap;
    use crate::seed;

    const H_3_1: f64 = 0.811_278_124_459_132_8;

    fn one_shot(examples: &[usize]) -> BootstrapSample {
        let n = examples.iter().max().map_or(0, |m| m + 1);
        BootstrapSample::from_in_bag(examples.to_vec(), n)
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[5, 5]).unwrap(), 1.0);
        assert_eq!(entropy(&[10, 0]).unwrap(), 0.0);
        assert!((entropy(&[3, 1]).unwrap() - H_3_1).abs() < 1e-15);
        assert!(matches!(entropy(&[0, 0]), Err(Error::EmptyCounts)));
        let h = entropy(&[1, 1, 1, 1]).unwrap();
        assert!((h - 2.0).abs() < 1e-15);
    }

    #[test]
    fn information_gain_values() {
        assert_eq!(information_gain(&[5, 5], &[5, 0], &[0, 5]).unwrap(), 1.0);
        assert!(information_gain(&[5, 5], &[3, 3], &[2, 2]).unwrap().abs() < 1e-15);
        let g = information_gain(&[4, 4], &[3, 1], &[1, 3]).unwrap();
        assert!((g - 0.188_721_875_540_867_17).abs() < 1e-15);
        assert!(information_gain(&[4, 4], &[3, 1], &[1, 2]).is_err());
        assert!(information_gain(&[4, 4], &[4, 4], &[0, 0]).is_err());
    }

    #[test]
    fn thresholds_are_midpoints() {
        assert_eq!(candidate_thresholds(&[1.0, 3.0]), [2.0]);
        assert_eq!(candidate_thresholds(&[1.0, 2.0, 4.0]), [1.5, 3.0]);
        assert!(candidate_thresholds(&[2.0, 2.0]).is_empty());
        let mut rng = seed::rng(9);
        let mut v: Vec<f64> = (0..50).map(|_| rng.random::<f64>() * 100.0).collect();
        v.sort_by(f64::total_cmp);
        let t = candidate_thresholds(&v);
        assert_eq!(t.len(), 49);
        for (i, &th) in t.iter().enumerate() {
            assert!(v[i] < th && th < v[i + 1]);
        }
    }

    #[test]
    fn subset_size_is_ceil_sqrt() {
        let cfg = TreeConfig::default().with_random_features(true);
        assert_eq!(cfg.features_per_node(4), 2);
        assert_eq!(cfg.features_per_node(16), 4);
        assert_eq!(cfg.features_per_node(10), 4);
        assert_eq!(cfg.features_per_node(1), 1);
        assert_eq!(TreeConfig::default().features_per_node(10), 10);
        for n in 0..10_000 {
            let d = ceil_sqrt(n);
            assert!(d * d >= n && (d == 0 || (d - 1) * (d - 1) < n));
        }
    }

    #[test]
    fn choose_split_single_attribute() {
        let d = Dataset::new(
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let cfg = TreeConfig {
            min_leaf_examples: 1,
            ..TreeConfig::default()
        };
        let s = choose_split(&d, &[0, 1, 2, 3], &cfg, &mut seed::rng(0)).unwrap();
        assert_eq!(
            s,
            SplitTest {
                attribute: 0,
                threshold: 2.5
            }
        );
        // Default min leaf of 2 still admits the middle split.
        let s = choose_split(&d, &[0, 1, 2, 3], &TreeConfig::default(), &mut seed::rng(0)).unwrap();
        assert_eq!(s.threshold, 2.5);
    }

    #[test]
    fn choose_split_identical_rows_gives_none() {
        let d = Dataset::new(vec![vec![1.0, 2.0]; 6], vec![0, 1, 0, 1, 0, 1], 2).unwrap();
        assert!(choose_split(
            &d,
            &[0, 1, 2, 3, 4, 5],
            &TreeConfig::default(),
            &mut seed::rng(1)
        )
        .is_none());
    }

    #[test]
    fn choose_split_rejects_zero_gain() {
        // Each value holds one example of each class: every split keeps proportions.
        let d = Dataset::new(
            vec![vec![1.0], vec![1.0], vec![2.0], vec![2.0]],
            vec![0, 1, 0, 1],
            2,
        )
        .unwrap();
        assert!(
            choose_split(&d, &[0, 1, 2, 3], &TreeConfig::default(), &mut seed::rng(1)).is_none()
        );
    }

    #[test]
    fn duplicate_attributes_tie_uniformly() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64]).collect();
        let d = Dataset::new(rows, vec![0, 0, 0, 0, 1, 1, 1, 1], 2).unwrap();
        let ex: Vec<usize> = (0..8).collect();
        let trials = 1000;
        let firsts = (0..trials)
            .filter(|&s| {
                choose_split(&d, &ex, &TreeConfig::default(), &mut seed::rng(s))
                    .unwrap()
                    .attribute
                    == 0
            })
            .count() as f64;
        // Binomial(1000, 0.5): mean 500, sd 15.8; 3 sigma band.
        assert!((firsts - 500.0).abs() <= 3.0 * 15.82, "{firsts}");
    }

    #[test]
    fn min_leaf_counts_draws() {
        // Split at 1.5 would leave a single distinct example drawn twice on the left.
        let d = Dataset::new(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 1], 2).unwrap();
        let s = choose_split(&d, &[0, 0, 1, 2], &TreeConfig::default(), &mut seed::rng(0)).unwrap();
        assert_eq!(s.threshold, 1.5);
        assert!(choose_split(&d, &[0, 1, 2], &TreeConfig::default(), &mut seed::rng(0)).is_none());
    }

    #[test]
    fn pure_sample_gives_single_leaf() {
        let d = Dataset::new(
            vec![vec![1.0], vec![2.0], vec![3.0], vec![9.0]],
            vec![0, 0, 0, 1],
            2,
        )
        .unwrap();
        let t = grow_tree(
            &one_shot(&[0, 1, 2]),
            &d,
            &TreeConfig::default(),
            &mut seed::rng(0),
        );
        assert_eq!(t.num_leaves(), 1);
        assert_eq!(t.leaf(0).ib_counts, [3, 0]);
        assert_eq!(t.route_to_leaf(&[100.0]).unwrap(), 0);
    }

    #[test]
    fn separable_data_gives_pure_leaves() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut rng = seed::rng(4);
        for i in 0..20 {
            let y = i % 2;
            let a: f64 = rng.random::<f64>() * 5.0;
            let b: f64 = rng.random::<f64>() * 5.0;
            // Class 1 lies above the line a + b = 5 by a margin of 1.
            let shift = if y == 1 { 6.0 } else { 0.0 };
            rows.push(vec![a * 0.5 + shift * 0.5, b * 0.5 + shift * 0.5]);
            labels.push(y);
        }
        let d = Dataset::new(rows, labels, 2).unwrap();
        let cfg = TreeConfig::default();
        let sample = stratified_bootstrap(&d, &mut seed::rng(2));
        let t = grow_tree(&sample, &d, &cfg, &mut seed::rng(3));
        for leaf in t.leaves() {
            assert!(is_pure(&leaf.ib_counts), "{:?}", leaf.ib_counts);
        }
    }

    #[test]
    fn route_boundary_goes_left() {
        let d = Dataset::new(
            vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
            vec![0, 0, 1, 1],
            2,
        )
        .unwrap();
        let t = grow_tree(
            &one_shot(&[0, 1, 2, 3]),
            &d,
            &TreeConfig::default(),
            &mut seed::rng(0),
        );
        let Node::Split { test, left, .. } = &t.nodes()[0] else {
            panic!("expected split")
        };
        assert_eq!(test.threshold, 2.5);
        let Node::Leaf { leaf } = t.nodes()[*left] else {
            panic!()
        };
        assert_eq!(t.route_to_leaf(&[2.5]).unwrap(), leaf);
        assert!(matches!(
            t.route_to_leaf(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn out_of_bag_binning() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let d = Dataset::new(rows, vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1], 2).unwrap();
        let sample = BootstrapSample::from_in_bag(vec![0, 0, 1], 10);
        let mut t = grow_tree(&sample, &d, &TreeConfig::default(), &mut seed::rng(0));
        assert_eq!(t.num_leaves(), 1);
        t.bin_out_of_bag(&sample, &d);
        assert_eq!(t.leaf(0).ob_members.len(), 8);
        assert_eq!(t.leaf(0).ob_counts, [7, 1]);

        let empty = BootstrapSample::from_in_bag((0..10).collect(), 10);
        let mut t = grow_tree(&empty, &d, &TreeConfig::default(), &mut seed::rng(0));
        t.bin_out_of_bag(&empty, &d);
        assert!(t.leaves().iter().all(|l| l.ob_members.is_empty()));
    }

    #[test]
    fn majority_class_ties_to_lowest() {
        let bins = |ib: [usize; 2]| LeafBins {
            ib_counts: ib.to_vec(),
            ob_counts: vec![0, 0],
            ib_members: vec![],
            ob_members: vec![],
        };
        assert_eq!(leaf_majority_class(&bins([3, 1])).unwrap(), 0);
        assert_eq!(leaf_majority_class(&bins([2, 2])).unwrap(), 0);
        assert_eq!(leaf_majority_class(&bins([0, 5])).unwrap(), 1);
        assert!(leaf_majority_class(&bins([0, 0])).is_err());
    }

    fn random_dataset(seed: u64, n: usize, d: usize) -> Dataset {
        let mut rng = seed::rng(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| (rng.random_range(0..6)) as f64).collect())
            .collect();
        let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        Dataset::new(rows, labels, 2).unwrap()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn grown_tree_invariants(s in 0u64..1_000_000, rf in proptest::bool::ANY) {
            let d = random_dataset(s, 60, 4);
            let cfg = TreeConfig::default().with_random_features(rf);
            let sample = stratified_bootstrap(&d, &mut seed::rng(s ^ 1));
            let mut t = grow_tree(&sample, &d, &cfg, &mut seed::rng(s ^ 2));
            t.bin_out_of_bag(&sample, &d);
            t.validate(2, 4).unwrap();
            let mut members: Vec<usize> = Vec::new();
            for (id, leaf) in t.leaves().iter().enumerate() {
                proptest::prop_assert!(leaf.n_ib() >= cfg.min_leaf_examples);
                for &i in &leaf.ib_members {
                    proptest::prop_assert_eq!(t.route_to_leaf(d.row(i)).unwrap(), id);
                }
                for &i in &leaf.ob_members {
                    proptest::prop_assert_eq!(t.route_to_leaf(d.row(i)).unwrap(), id);
                }
                members.extend(&leaf.ib_members);
                // Pure, or no admissible positive-gain split remains.
                if !is_pure(&leaf.ib_counts) && !rf {
                    proptest::prop_assert!(choose_split(&d, &leaf.ib_members, &cfg, &mut seed::rng(0)).is_none());
                }
            }
            members.sort_unstable();
            proptest::prop_assert_eq!(members, sample.in_bag.clone());
            let ob: usize = t.leaves().iter().map(|l| l.ob_members.len()).sum();
            proptest::prop_assert_eq!(ob, sample.out_bag.len());
            let mut again = grow_tree(&sample, &d, &cfg, &mut seed::rng(s ^ 2));
            again.bin_out_of_bag(&sample, &d);
            proptest::prop_assert_eq!(again, t);
        }
    }
}
