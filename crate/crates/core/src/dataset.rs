//! Numeric tabular datasets, CSV loading, holdout splits and class-stratified
//! bootstrap replicates.

use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::Fingerprint;

/// Number of reshuffles [`holdout_split`] tries before giving up.
pub const MAX_SPLIT_ATTEMPTS: usize = 100;

/// Selects the label column of a CSV file.
///
/// In configuration files an integer selects by index and a string by
/// header name.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires the file to have a header row.
    Name(String),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.trim().to_string()),
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
        }
    }
}

/// Feature matrix plus dense class labels.
///
/// Labels are indices into `class_names`, which hold the original label
/// strings in the order they were first seen (or the order requested by
/// [`filter_classes`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    num_features: usize,
    labels: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset with class names `"0".."K-1"`.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let class_names = (0..num_classes).map(|k| k.to_string()).collect();
        Self::with_class_names(rows, labels, class_names)
    }

    pub fn with_class_names(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let num_features = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != num_features) {
            return Err(Error::DimensionMismatch {
                expected: num_features,
                found: bad.len(),
            });
        }
        let features = rows.into_iter().flatten().collect();
        Self::from_flat(features, num_features, labels, class_names, None)
    }

    fn from_flat(
        features: Vec<f64>,
        num_features: usize,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidDataset("no examples".into()));
        }
        if num_features == 0 {
            return Err(Error::InvalidDataset("no features".into()));
        }
        if features.len() != n * num_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature values for {n} rows of {num_features}",
                features.len()
            )));
        }
        if let Some(v) = features.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature value {v}"
            )));
        }
        let k = class_names.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        let mut counts = vec![0usize; k];
        for &y in &labels {
            if y >= k {
                return Err(Error::InvalidDataset(format!(
                    "label {y} out of range for {k} classes"
                )));
            }
            counts[y] += 1;
        }
        if let Some(absent) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidDataset(format!(
                "class {:?} has no examples",
                class_names[absent]
            )));
        }
        if let Some(names) = &feature_names {
            if names.len() != num_features {
                return Err(Error::InvalidDataset(
                    "feature name count differs from feature count".into(),
                ));
            }
        }
        Ok(Dataset {
            features,
            num_features,
            labels,
            class_names,
            feature_names,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.num_features {
            return Err(Error::InvalidDataset(
                "feature name count differs from feature count".into(),
            ));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.num_features..(i + 1) * self.num_features]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.num_features)
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Number of examples of each class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Class frequencies; the base rates used by the metrics.
    pub fn priors(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.class_counts()
            .into_iter()
            .map(|c| c as f64 / n)
            .collect()
    }

    /// Rows at `indices`, keeping the class and feature naming. Fails if a
    /// class ends up without examples.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut features = Vec::with_capacity(indices.len() * self.num_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::InvalidArgument(format!(
                    "row index {i} out of range"
                )));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::from_flat(
            features,
            self.num_features,
            labels,
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }

    /// Content digest over features, labels and class names.
    pub fn digest(&self) -> String {
        let mut fp = Fingerprint::new("dataset");
        fp.usize(self.num_features).usizes(&self.labels);
        for name in &self.class_names {
            fp.str(name);
        }
        for &v in &self.features {
            fp.f64(v);
        }
        fp.finish()
    }
}

/// Parsed CSV contents before label remapping.
#[derive(Debug, Clone)]
pub struct Table {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<String>>,
    pub feature_names: Option<Vec<String>>,
}

impl Table {
    /// Dense labels in order of first appearance.
    pub fn into_dataset(self) -> Result<Dataset> {
        let raw = self
            .labels
            .ok_or_else(|| Error::InvalidArgument("table has no label column".into()))?;
        let mut class_names: Vec<String> = Vec::new();
        let labels = raw
            .iter()
            .map(|l| match class_names.iter().position(|c| c == l) {
                Some(k) => k,
                None => {
                    class_names.push(l.clone());
                    class_names.len() - 1
                }
            })
            .collect::<Vec<_>>();
        if class_names.len() < 2 {
            return Err(Error::TooFewClasses(class_names.len()));
        }
        let num_features = self.rows.first().map_or(0, Vec::len);
        let features = self.rows.into_iter().flatten().collect();
        Dataset::from_flat(
            features,
            num_features,
            labels,
            class_names,
            self.feature_names,
        )
    }

    /// Labels mapped onto a fixed list of class names (e.g. a model's).
    /// Classes absent from this table are allowed; unknown labels are not.
    pub fn labels_as(&self, class_names: &[String]) -> Result<Vec<usize>> {
        let raw = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("table has no label column".into()))?;
        raw.iter()
            .map(|l| {
                class_names.iter().position(|c| c == l).ok_or_else(|| {
                    Error::ModelMismatch(format!(
                        "label {l:?} is not one of the model's {} classes {class_names:?}",
                        class_names.len()
                    ))
                })
            })
            .collect()
    }

    pub fn num_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads comma-separated data. With `label` set, that column holds class
/// labels and every other cell must be numeric; without it every column is a
/// feature. A header row is assumed iff the first row has a non-numeric
/// feature cell, or the label is selected by name.
pub fn read_table<R: Read>(reader: R, label: Option<&LabelColumn>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line() as usize);
        records.push((line, rec));
    }
    let Some((_, first)) = records.first() else {
        return Err(Error::InvalidDataset("empty file".into()));
    };
    let width = first.len();

    let (label_idx, has_header) = match label {
        None => (
            None,
            first
                .iter()
                .any(|c| !is_missing(c) && parse_number(c).is_none()),
        ),
        Some(LabelColumn::Index(i)) => {
            if *i >= width {
                return Err(Error::UnknownColumn(format!(
                    "index {i} (file has {width} columns)"
                )));
            }
            let header = first
                .iter()
                .enumerate()
                .any(|(j, c)| j != *i && !is_missing(c) && parse_number(c).is_none());
            (Some(*i), header)
        }
        Some(LabelColumn::Name(name)) => {
            let i = first
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::UnknownColumn(format!("{name:?}")))?;
            (Some(i), true)
        }
    };
    if width < 1 + usize::from(label_idx.is_some()) {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let feature_names = has_header.then(|| {
        first
            .iter()
            .enumerate()
            .filter(|(j, _)| Some(*j) != label_idx)
            .map(|(_, c)| c.to_string())
            .collect()
    });

    let body = &records[usize::from(has_header)..];
    if body.is_empty() {
        return Err(Error::InvalidDataset("no data rows".into()));
    }
    let mut rows = Vec::with_capacity(body.len());
    let mut labels = label_idx.map(|_| Vec::with_capacity(body.len()));
    for (line, rec) in body {
        if rec.len() != width {
            return Err(Error::RaggedRow {
                line: *line,
                expected: width,
                found: rec.len(),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (j, cell) in rec.iter().enumerate() {
            if is_missing(cell) {
                return Err(Error::MissingValue {
                    line: *line,
                    column: j + 1,
                });
            }
            if Some(j) == label_idx {
                if let Some(labels) = labels.as_mut() {
                    labels.push(cell.to_string());
                }
                continue;
            }
            let v = parse_number(cell).ok_or_else(|| Error::NonNumeric {
                line: *line,
                column: j + 1,
                value: cell.to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(Table {
        rows,
        labels,
        feature_names,
    })
}

pub fn read_table_file(path: &Path, label: Option<&LabelColumn>) -> Result<Table> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_table(file, label)
}

/// Loads a labelled CSV file; labels are re-indexed densely in order of
/// first appearance.
pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<Dataset> {
    read_table_file(path, Some(label))?.into_dataset()
}

/// Keeps only the rows of two classes, named by their original identifiers;
/// `keep.0` becomes class 0 and `keep.1` class 1.
pub fn filter_classes(d: &Dataset, keep: (&str, &str)) -> Result<Dataset> {
    if keep.0 == keep.1 {
        return Err(Error::InvalidArgument(format!(
            "class {:?} selected twice",
            keep.0
        )));
    }
    let find = |name: &str| {
        d.class_names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    };
    let a = find(keep.0)?;
    let b = find(keep.1)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, &y) in d.labels.iter().enumerate() {
        let new = if y == a {
            0
        } else if y == b {
            1
        } else {
            continue;
        };
        features.extend_from_slice(d.row(i));
        labels.push(new);
    }
    Dataset::from_flat(
        features,
        d.num_features,
        labels,
        vec![keep.0.to_string(), keep.1.to_string()],
        d.feature_names.clone(),
    )
}

/// A train/test partition together with the row indices it came from.
#[derive(Debug, Clone)]
pub struct HoldoutSplit {
    pub train: Dataset,
    pub test: Dataset,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl HoldoutSplit {
    /// Digest of the index partition, used to check that estimators were
    /// compared on identical splits.
    pub fn digest(&self) -> String {
        let mut fp = Fingerprint::new("partition");
        fp.usizes(&self.train_indices).usizes(&self.test_indices);
        fp.finish()
    }
}

/// Random holdout of `round(test_fraction * N)` examples, reshuffling until
/// every class appears in both partitions.
pub fn holdout_split<R: Rng + ?Sized>(
    d: &Dataset,
    test_fraction: f64,
    rng: &mut R,
) -> Result<HoldoutSplit> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test fraction {test_fraction} not in (0, 1)"
        )));
    }
    let n = d.len();
    let n_test = (test_fraction * n as f64).round() as usize;
    let k = d.num_classes();
    if n_test < k || n - n_test < k {
        return Err(Error::SplitFailed { attempts: 0 });
    }
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..MAX_SPLIT_ATTEMPTS {
        order.shuffle(rng);
        let mut test_indices = order[..n_test].to_vec();
        let mut train_indices = order[n_test..].to_vec();
        test_indices.sort_unstable();
        train_indices.sort_unstable();
        let covers = |idx: &[usize]| {
            let mut seen = vec![false; k];
            idx.iter().for_each(|&i| seen[d.labels[i]] = true);
            seen.into_iter().all(|s| s)
        };
        if covers(&test_indices) && covers(&train_indices) {
            return Ok(HoldoutSplit {
                train: d.subset(&train_indices)?,
                test: d.subset(&test_indices)?,
                train_indices,
                test_indices,
            });
        }
    }
    Err(Error::SplitFailed {
        attempts: MAX_SPLIT_ATTEMPTS,
    })
}

/// In-bag multiset and out-of-bag set of one bootstrap replicate, as
/// indices into the training set. Both are sorted.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BootstrapSample {
    pub in_bag: Vec<usize>,
    pub out_bag: Vec<usize>,
}

impl BootstrapSample {
    /// Builds a sample from an in-bag multiset over `n` training rows.
    pub fn from_in_bag(mut in_bag: Vec<usize>, n: usize) -> Self {
        in_bag.sort_unstable();
        let mut drawn = vec![false; n];
        in_bag.iter().for_each(|&i| drawn[i] = true);
        let out_bag = (0..n).filter(|&i| !drawn[i]).collect();
        BootstrapSample { in_bag, out_bag }
    }

    /// Number of times `i` was drawn.
    pub fn draws(&self, i: usize) -> usize {
        let lo = self.in_bag.partition_point(|&x| x < i);
        let hi = self.in_bag.partition_point(|&x| x <= i);
        hi - lo
    }

    pub fn is_out_of_bag(&self, i: usize) -> bool {
        self.out_bag.binary_search(&i).is_ok()
    }
}

/// Bootstrap replicate drawn per class: for each class k, `N_k` draws with
/// replacement from the class-k examples.
pub fn stratified_bootstrap<R: Rng + ?Sized>(train: &Dataset, rng: &mut R) -> BootstrapSample {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); train.num_classes()];
    for (i, &y) in train.labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let mut in_bag = Vec::with_capacity(train.len());
    for members in &by_class {
        for _ in 0..members.len() {
            in_bag.push(members[rng.random_range(0..members.len())]);
        }
    }
    BootstrapSample::from_in_bag(in_bag, train.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn balanced(n: usize) -> Dataset {
        let rows = (0..n).map(|i| vec![i as f64]).collect();
        let labels = (0..n).map(|i| i % 2).collect();
        Dataset::new(rows, labels, 2).unwrap()
    }

    #[test]
    fn minimal_parse() {
        let t = read_table("1.0,0\n2.0,1".as_bytes(), Some(&LabelColumn::Index(1))).unwrap();
        let d = t.into_dataset().unwrap();
        assert_eq!((d.len(), d.num_features(), d.num_classes()), (2, 1, 2));
        assert!(d.feature_names().is_none());
    }

    #[test]
    fn empty_cell_is_reported_with_location() {
        let err = read_table("1.0,0\n,1\n".as_bytes(), Some(&LabelColumn::Index(1))).unwrap_err();
        assert!(
            matches!(err, Error::MissingValue { line: 2, column: 1 }),
            "{err}"
        );
        let err = read_table("1.0,0\n2.0,\n".as_bytes(), Some(&LabelColumn::Index(1))).unwrap_err();
        assert!(
            matches!(err, Error::MissingValue { line: 2, column: 2 }),
            "{err}"
        );
    }

    #[test]
    fn non_numeric_feature_rejected() {
        let err =
            read_table("1,0\n2,1\nabc,1\n".as_bytes(), Some(&LabelColumn::Index(1))).unwrap_err();
        assert!(
            matches!(
                err,
                Error::NonNumeric {
                    line: 3,
                    column: 1,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn single_class_rejected() {
        let t = read_table("1,a\n2,a\n".as_bytes(), Some(&LabelColumn::Index(1))).unwrap();
        assert!(matches!(t.into_dataset(), Err(Error::TooFewClasses(1))));
    }

    #[test]
    fn labels_remapped_by_first_appearance() {
        let csv = "0.1,1.0,2.0,7\n0.2,1.1,2.1,5\n0.3,1.2,2.2,7\n\
                   0.4,1.3,2.3,5\n0.5,1.4,2.4,5\n0.6,1.5,2.5,7\n";
        let d = read_table(csv.as_bytes(), Some(&LabelColumn::Index(3)))
            .unwrap()
            .into_dataset()
            .unwrap();
        assert_eq!(d.num_classes(), 2);
        assert_eq!(d.num_features(), 3);
        assert_eq!(d.class_names(), ["7", "5"]);
        assert_eq!(d.labels(), [0, 1, 0, 1, 1, 0]);
        assert_eq!(d.row(4), [0.5, 1.4, 2.4]);
    }

    #[test]
    fn header_detection_and_named_label() {
        let csv = "a,b,class\n1,2,x\n3,4,y\n";
        let d = read_table(csv.as_bytes(), Some(&LabelColumn::Name("class".into())))
            .unwrap()
            .into_dataset()
            .unwrap();
        assert_eq!(d.feature_names().unwrap(), ["a", "b"]);
        assert_eq!(d.len(), 2);
        let d = read_table(csv.as_bytes(), Some(&LabelColumn::Index(2)))
            .unwrap()
            .into_dataset()
            .unwrap();
        assert_eq!(d.len(), 2);
        assert!(matches!(
            read_table(csv.as_bytes(), Some(&LabelColumn::Name("nope".into()))),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn filter_keeps_requested_pair() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (k, n) in [(0usize, 10usize), (1, 20), (2, 30)] {
            for i in 0..n {
                rows.push(vec![i as f64]);
                labels.push(k);
            }
        }
        let d = Dataset::with_class_names(rows, labels, vec!["1".into(), "2".into(), "3".into()])
            .unwrap();
        let f = filter_classes(&d, ("2", "3")).unwrap();
        assert_eq!(f.len(), 50);
        assert_eq!(f.num_classes(), 2);
        assert_eq!(f.class_counts(), [20, 30]);
        assert!(matches!(
            filter_classes(&d, ("2", "9")),
            Err(Error::UnknownClass(_))
        ));
    }

    #[test]
    fn filter_identity_on_binary() {
        let d = balanced(10);
        assert_eq!(filter_classes(&d, ("0", "1")).unwrap(), d);
    }

    #[test]
    fn holdout_sizes_and_determinism() {
        let d = balanced(99);
        let s = holdout_split(&d, 1.0 / 3.0, &mut seed::rng(5)).unwrap();
        assert_eq!((s.test.len(), s.train.len()), (33, 66));
        let mut all: Vec<usize> = s
            .train_indices
            .iter()
            .chain(&s.test_indices)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..99).collect::<Vec<_>>());
        let again = holdout_split(&d, 1.0 / 3.0, &mut seed::rng(5)).unwrap();
        assert_eq!(s.train_indices, again.train_indices);
        assert_eq!(s.digest(), again.digest());
    }

    #[test]
    fn holdout_every_class_present_over_many_seeds() {
        let d = balanced(300);
        for s in 0..1000 {
            let split = holdout_split(&d, 1.0 / 3.0, &mut seed::rng(s)).unwrap();
            assert!(split.test.class_counts().iter().all(|&c| c > 0));
            assert!(split.train.class_counts().iter().all(|&c| c > 0));
        }
    }

    #[test]
    fn holdout_impossible_split_errors() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0], vec![2.0]], vec![0, 0, 1], 2).unwrap();
        assert!(matches!(
            holdout_split(&d, 0.5, &mut seed::rng(1)),
            Err(Error::SplitFailed { .. })
        ));
        assert!(holdout_split(&d, 1.0, &mut seed::rng(1)).is_err());
    }

    #[test]
    fn bootstrap_forced_draws() {
        let d = Dataset::new(vec![vec![0.0], vec![1.0]], vec![0, 1], 2).unwrap();
        let s = stratified_bootstrap(&d, &mut seed::rng(3));
        assert_eq!(s.in_bag, [0, 1]);
        assert!(s.out_bag.is_empty());
    }

    #[test]
    fn out_of_bag_fraction_near_inverse_e() {
        let d = balanced(1000);
        let mean: f64 = (0..100)
            .map(|s| stratified_bootstrap(&d, &mut seed::rng(s)).out_bag.len() as f64 / 1000.0)
            .sum::<f64>()
            / 100.0;
        assert!((0.35..=0.40).contains(&mean), "{mean}");
        let e = (-1.0f64).exp();
        assert!((mean - e).abs() <= 0.02, "{mean}");
    }

    proptest::proptest! {
        #[test]
        fn bootstrap_preserves_class_counts(seed in 0u64..10_000, n in 2usize..200, k in 2usize..5) {
            let rows = (0..n.max(k)).map(|i| vec![i as f64]).collect::<Vec<_>>();
            let labels = (0..rows.len()).map(|i| (i * 7 + i / 3) % k).collect::<Vec<_>>();
            let d = match Dataset::new(rows, labels, k) { Ok(d) => d, Err(_) => return Ok(()) };
            let s = stratified_bootstrap(&d, &mut seed::rng(seed));
            proptest::prop_assert_eq!(s.in_bag.len(), d.len());
            let mut drawn = vec![0usize; k];
            s.in_bag.iter().for_each(|&i| drawn[d.label(i)] += 1);
            proptest::prop_assert_eq!(drawn, d.class_counts());
            let mut distinct = s.in_bag.clone();
            distinct.dedup();
            for &i in &s.out_bag {
                proptest::prop_assert!(distinct.binary_search(&i).is_err());
            }
            proptest::prop_assert_eq!(distinct.len() + s.out_bag.len(), d.len());
        }
    }
}
