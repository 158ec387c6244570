//! Scoring probability estimates: 0/1-MSE, average log-loss, area under the
//! lift chart and change in accuracy.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ProbEstimate;
use crate::tree::argmax_lowest;

/// Estimates for a test set together with the true labels and the training
/// set's class priors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSet {
    estimates: Vec<ProbEstimate>,
    labels: Vec<usize>,
    train_priors: Vec<f64>,
}

impl ScoredSet {
    pub fn new(
        estimates: Vec<ProbEstimate>,
        labels: Vec<usize>,
        train_priors: Vec<f64>,
    ) -> Result<Self> {
        let k = train_priors.len();
        if estimates.is_empty() {
            return Err(Error::InvalidArgument("no estimates to score".into()));
        }
        if estimates.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: estimates.len(),
                found: labels.len(),
            });
        }
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if train_priors.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidArgument(
                "training priors must lie in (0, 1]".into(),
            ));
        }
        let total: f64 = train_priors.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "training priors sum to {total}"
            )));
        }
        for (u, e) in estimates.iter().enumerate() {
            if e.probs.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: e.probs.len(),
                });
            }
            if e.probs.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "estimate {u} is not finite"
                )));
            }
            if labels[u] >= k || e.predicted_class >= k {
                return Err(Error::InvalidArgument(format!(
                    "estimate {u} has a class out of range"
                )));
            }
        }
        Ok(ScoredSet {
            estimates,
            labels,
            train_priors,
        })
    }

    /// Convenience constructor from raw probability rows; votes default to
    /// the argmax.
    pub fn from_probs(
        probs: Vec<Vec<f64>>,
        labels: Vec<usize>,
        train_priors: Vec<f64>,
    ) -> Result<Self> {
        let estimates = probs
            .into_iter()
            .map(|p| ProbEstimate {
                predicted_class: argmax_lowest(&p),
                probs: p,
            })
            .collect();
        Self::new(estimates, labels, train_priors)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.train_priors.len()
    }

    pub fn estimates(&self) -> &[ProbEstimate] {
        &self.estimates
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn train_priors(&self) -> &[f64] {
        &self.train_priors
    }

    /// The ensemble vote recorded with each estimate.
    pub fn vote_labels(&self) -> Vec<usize> {
        self.estimates.iter().map(|e| e.predicted_class).collect()
    }

    fn correct_class_probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.estimates
            .iter()
            .zip(&self.labels)
            .map(|(e, &y)| e.probs[y])
    }
}

/// Mean squared error on the probability of the true class.
pub fn zero_one_mse(s: &ScoredSet) -> f64 {
    let sum: f64 = s.correct_class_probs().map(|p| (1.0 - p) * (1.0 - p)).sum();
    sum / s.len() as f64
}

pub fn clamp_epsilon(train_priors: &[f64]) -> f64 {
    let min_prior = train_priors.iter().copied().fold(f64::INFINITY, f64::min);
    0.005_f64.min(0.5 * min_prior)
}

/// Replaces exact 0 with ε and exact 1 with 1 − ε. Nothing is renormalized.
pub fn clamp_extremes(probs: &[f64], train_priors: &[f64]) -> Vec<f64> {
    let eps = clamp_epsilon(train_priors);
    probs
        .iter()
        .map(|&p| {
            if p == 0.0 {
                eps
            } else if p == 1.0 {
                1.0 - eps
            } else {
                p
            }
        })
        .collect()
}

/// Average log-loss in bits.
pub fn avg_log_loss(s: &ScoredSet) -> f64 {
    let eps = clamp_epsilon(&s.train_priors);
    let sum: f64 = s
        .correct_class_probs()
        .map(|p| {
            let p = if p == 0.0 {
                eps
            } else if p == 1.0 {
                1.0 - eps
            } else {
                p
            };
            -p.log2()
        })
        .sum();
    sum / s.len() as f64
}

/// Examples ranked by descending estimate for `class`, collapsed into groups
/// of equal estimates: `(group size, class members in group)`.
fn ranked_groups(s: &ScoredSet, class: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| {
        s.estimates[b].probs[class]
            .total_cmp(&s.estimates[a].probs[class])
            .then(a.cmp(&b))
    });
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut prev: Option<f64> = None;
    for u in order {
        let p = s.estimates[u].probs[class];
        let hit = usize::from(s.labels[u] == class);
        match (prev, groups.last_mut()) {
            (Some(q), Some(g)) if q.total_cmp(&p) == Ordering::Equal => {
                g.0 += 1;
                g.1 += hit;
            }
            _ => groups.push((1, hit)),
        }
        prev = Some(p);
    }
    groups
}

fn class_total(s: &ScoredSet, class: usize) -> Result<usize> {
    if class >= s.num_classes() {
        return Err(Error::UnknownClass(class.to_string()));
    }
    let total = s.labels.iter().filter(|&&y| y == class).count();
    if total == 0 {
        return Err(Error::InvalidArgument(format!(
            "class {class} does not occur in the test labels; lift is undefined"
        )));
    }
    Ok(total)
}

/// Lift of the top `v` fraction of examples ranked by the estimate for
/// `class`. When the cut falls inside a group of tied estimates, that group
/// contributes in proportion to the part of it that is included, so the
/// result does not depend on the order of tied examples.
pub fn lift(s: &ScoredSet, class: usize, v: f64) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lift proportion {v} is outside (0, 1]"
        )));
    }
    let total = class_total(s, class)?;
    let u = s.len();
    let scaled = v * u as f64;
    let top = if (scaled - scaled.round()).abs() < 1e-9 {
        scaled.round()
    } else {
        scaled.ceil()
    };
    let top = (top as usize).clamp(1, u);
    let mut taken = 0usize;
    let mut hits = 0.0;
    for (size, members) in ranked_groups(s, class) {
        if taken + size <= top {
            taken += size;
            hits += members as f64;
        } else {
            let part = top - taken;
            hits += members as f64 * part as f64 / size as f64;
            break;
        }
        if taken == top {
            break;
        }
    }
    let rate_top = hits / top as f64;
    let rate_all = total as f64 / u as f64;
    Ok(rate_top / rate_all)
}

/// The evaluated lift-chart points `(v, l(v))` for `class`: one at the end
/// of each group of equal estimates, the last at `v = 1`.
pub fn lift_curve(s: &ScoredSet, class: usize) -> Result<Vec<(f64, f64)>> {
    let total = class_total(s, class)?;
    let u = s.len() as f64;
    let rate_all = total as f64 / u;
    let mut points = Vec::new();
    let (mut taken, mut hits) = (0usize, 0usize);
    for (size, members) in ranked_groups(s, class) {
        taken += size;
        hits += members;
        points.push((taken as f64 / u, (hits as f64 / taken as f64) / rate_all));
    }
    Ok(points)
}

/// Trapezoidal area under a lift curve, with the curve held at its first
/// value between `v = 0` and the first point.
pub fn area_under_curve(points: &[(f64, f64)]) -> f64 {
    let Some(&(v0, l0)) = points.first() else {
        return 0.0;
    };
    let mut area = v0 * l0;
    for w in points.windows(2) {
        let ((va, la), (vb, lb)) = (w[0], w[1]);
        area += (vb - va) * (la + lb) / 2.0;
    }
    area
}

/// Prior-weighted area under the lift chart, plus the per-class areas.
pub fn aulc(s: &ScoredSet) -> Result<(f64, Vec<f64>)> {
    let per_class = (0..s.num_classes())
        .map(|k| lift_curve(s, k).map(|c| area_under_curve(&c)))
        .collect::<Result<Vec<f64>>>()?;
    let weighted = per_class
        .iter()
        .zip(&s.train_priors)
        .map(|(a, p)| a * p)
        .sum();
    Ok((weighted, per_class))
}

/// Accuracy of argmax classification minus accuracy of `vote_labels`.
pub fn delta_accuracy(s: &ScoredSet, vote_labels: &[usize]) -> Result<f64> {
    if vote_labels.len() != s.len() {
        return Err(Error::DimensionMismatch {
            expected: s.len(),
            found: vote_labels.len(),
        });
    }
    let mut argmax_right = 0usize;
    let mut vote_right = 0usize;
    for ((e, &y), &v) in s.estimates.iter().zip(&s.labels).zip(vote_labels) {
        argmax_right += usize::from(argmax_lowest(&e.probs) == y);
        vote_right += usize::from(v == y);
    }
    Ok((argmax_right as f64 - vote_right as f64) / s.len() as f64)
}

/// The four metrics for one scored set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub zero_one_mse: f64,
    /// Bits.
    pub av_log_loss: f64,
    pub aulc: f64,
    pub delta_acc: f64,
    pub per_class_aulc: Vec<f64>,
}

impl MetricReport {
    /// Scores `s`, taking the vote from each estimate's `predicted_class`.
    pub fn compute(s: &ScoredSet) -> Result<MetricReport> {
        let (aulc, per_class_aulc) = aulc(s)?;
        Ok(MetricReport {
            zero_one_mse: zero_one_mse(s),
            av_log_loss: avg_log_loss(s),
            aulc,
            delta_acc: delta_accuracy(s, &s.vote_labels())?,
            per_class_aulc,
        })
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::ZeroOneMse => self.zero_one_mse,
            Metric::AvLogLoss => self.av_log_loss,
            Metric::Aulc => self.aulc,
            Metric::DeltaAcc => self.delta_acc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ZeroOneMse,
    AvLogLoss,
    Aulc,
    DeltaAcc,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::ZeroOneMse,
        Metric::AvLogLoss,
        Metric::Aulc,
        Metric::DeltaAcc,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Metric::ZeroOneMse => "zero_one_mse",
            Metric::AvLogLoss => "av_log_loss",
            Metric::Aulc => "aulc",
            Metric::DeltaAcc => "delta_acc",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::ZeroOneMse => "0/1-MSE",
            Metric::AvLogLoss => "AvLL",
            Metric::Aulc => "AULC",
            Metric::DeltaAcc => "ΔAcc",
        }
    }

    pub fn lower_is_better(self) -> bool {
        matches!(self, Metric::ZeroOneMse | Metric::AvLogLoss)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use rand::Rng;

    fn set(probs: &[&[f64]], labels: &[usize]) -> ScoredSet {
        let k = probs[0].len();
        ScoredSet::from_probs(
            probs.iter().map(|p| p.to_vec()).collect(),
            labels.to_vec(),
            vec![1.0 / k as f64; k],
        )
        .unwrap()
    }

    #[test]
    fn mse_examples() {
        assert_eq!(
            zero_one_mse(&set(&[&[1.0, 0.0], &[0.0, 1.0]], &[0, 1])),
            0.0
        );
        let s = set(&[&[0.8, 0.2]], &[0]);
        assert!((zero_one_mse(&s) - 0.04).abs() < 1e-15);
        let s = set(&[&[0.6, 0.4], &[0.1, 0.9]], &[0, 1]);
        assert!((zero_one_mse(&s) - 0.085).abs() < 1e-15);
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(clamp_extremes(&[1.0, 0.0], &[0.5, 0.5]), vec![0.995, 0.005]);
        assert_eq!(clamp_extremes(&[0.7, 0.3], &[0.5, 0.5]), vec![0.7, 0.3]);
        assert_eq!(
            clamp_extremes(&[0.0, 1.0], &[0.004, 0.996]),
            vec![0.002, 0.998]
        );
    }

    #[test]
    fn log_loss_examples() {
        assert_eq!(
            avg_log_loss(&set(&[&[0.5, 0.5], &[0.5, 0.5]], &[0, 1])),
            1.0
        );
        assert_eq!(
            avg_log_loss(&set(&[&[0.25, 0.75], &[0.5, 0.5]], &[0, 1])),
            1.5
        );
        let ll = avg_log_loss(&set(&[&[0.0, 1.0]], &[0]));
        assert!((ll - 7.643856189774724).abs() < 1e-12);
        let best = avg_log_loss(&set(&[&[1.0, 0.0]], &[0]));
        assert!((best - -(0.995f64).log2()).abs() < 1e-15);
    }

    #[test]
    fn lift_examples() {
        // Estimates 1.0 down to 0.1; class members at ranks 1, 2, 3, 5, 7.
        let labels = [0, 0, 0, 1, 0, 1, 0, 1, 1, 1];
        let probs: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![1.0 - 0.1 * i as f64, 0.1 * i as f64])
            .collect();
        let s = ScoredSet::from_probs(probs, labels.to_vec(), vec![0.5, 0.5]).unwrap();
        assert!((lift(&s, 0, 0.5).unwrap() - 1.6).abs() < 1e-12);
        assert_eq!(lift(&s, 0, 1.0).unwrap(), 1.0);
        assert_eq!(lift(&s, 1, 1.0).unwrap(), 1.0);

        let perfect = set(
            &[&[0.9, 0.1], &[0.8, 0.2], &[0.3, 0.7], &[0.1, 0.9]],
            &[0, 0, 1, 1],
        );
        assert_eq!(lift(&perfect, 0, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn lift_rejects_absent_class_and_bad_proportion() {
        let s = set(&[&[0.9, 0.1], &[0.8, 0.2]], &[0, 0]);
        assert!(lift(&s, 1, 0.5).is_err());
        assert!(lift(&s, 0, 0.0).is_err());
        assert!(lift(&s, 0, 1.5).is_err());
        assert!(aulc(&s).is_err());
    }

    #[test]
    fn tied_cut_is_fractional() {
        // Four tied examples, two in class 0: any cut gives lift 1.
        let s = set(&[&[0.5, 0.5] as &[f64]; 4], &[0, 1, 0, 1]);
        for v in [0.25, 0.5, 0.75] {
            assert_eq!(lift(&s, 0, v).unwrap(), 1.0);
        }
    }

    #[test]
    fn constant_predictions_give_unit_area() {
        let s = set(&[&[0.3, 0.7] as &[f64]; 6], &[0, 1, 1, 0, 1, 1]);
        let (a, per) = aulc(&s).unwrap();
        assert_eq!(per, vec![1.0, 1.0]);
        assert_eq!(a, 1.0);
    }

    #[test]
    fn perfect_balanced_ranker_area() {
        // Points (1/4, 2), (2/4, 2), (3/4, 4/3), (1, 1).
        let s = set(
            &[&[0.9, 0.1], &[0.8, 0.2], &[0.3, 0.7], &[0.1, 0.9]],
            &[0, 0, 1, 1],
        );
        let expected =
            0.25 * 2.0 + 0.25 * 2.0 + 0.125 * (2.0 + 4.0 / 3.0) + 0.125 * (4.0 / 3.0 + 1.0);
        let (a, per) = aulc(&s).unwrap();
        for x in per.iter().chain([&a]) {
            assert!((x - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_accuracy_examples() {
        let s = set(
            &[&[0.9, 0.1], &[0.2, 0.8], &[0.6, 0.4], &[0.4, 0.6]],
            &[0, 1, 0, 0],
        );
        assert_eq!(delta_accuracy(&s, &[0, 1, 0, 1]).unwrap(), 0.0);
        assert_eq!(delta_accuracy(&s, &[0, 1, 1, 1]).unwrap(), 0.25);
        // Exact tie resolves to class 0.
        let tie = set(&[&[0.5, 0.5]], &[0]);
        assert_eq!(delta_accuracy(&tie, &[1]).unwrap(), 1.0);
        assert!(delta_accuracy(&tie, &[0, 1]).is_err());
    }

    #[test]
    fn scored_set_validation() {
        let p = vec![vec![0.5, 0.5]];
        assert!(ScoredSet::from_probs(p.clone(), vec![2], vec![0.5, 0.5]).is_err());
        assert!(ScoredSet::from_probs(p.clone(), vec![0], vec![0.6, 0.5]).is_err());
        assert!(ScoredSet::from_probs(p.clone(), vec![0, 1], vec![0.5, 0.5]).is_err());
        assert!(ScoredSet::from_probs(vec![], vec![], vec![0.5, 0.5]).is_err());
        assert!(ScoredSet::from_probs(vec![vec![0.2, 0.3, 0.5]], vec![0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn report_ranges_on_random_sets() {
        let mut rng = seed::rng(11);
        for _ in 0..50 {
            let k = rng.random_range(2..5);
            let u = rng.random_range(k..40);
            let probs: Vec<Vec<f64>> = (0..u)
                .map(|_| {
                    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
                    let t: f64 = w.iter().sum();
                    w.iter().map(|x| x / t).collect()
                })
                .collect();
            let mut labels: Vec<usize> = (0..u).map(|_| rng.random_range(0..k)).collect();
            labels[..k].iter_mut().enumerate().for_each(|(i, y)| *y = i);
            let s = ScoredSet::from_probs(probs, labels, vec![1.0 / k as f64; k]).unwrap();
            let r = MetricReport::compute(&s).unwrap();
            assert!((0.0..=1.0).contains(&r.zero_one_mse));
            assert!(r.av_log_loss >= 0.0 && r.av_log_loss.is_finite());
            assert!((-1.0..=1.0).contains(&r.delta_acc));
            // Votes default to the argmax.
            assert_eq!(r.delta_acc, 0.0);
        }
    }

    proptest::proptest! {
        #[test]
        fn metric_invariants(
            rows in proptest::collection::vec((0u8..5, 0u8..5, proptest::bool::ANY), 2..40),
        ) {
            let probs: Vec<Vec<f64>> = rows
                .iter()
                .map(|&(a, b, _)| {
                    let (a, b) = (f64::from(a), f64::from(b));
                    if a + b == 0.0 { vec![0.5, 0.5] } else { vec![a / (a + b), b / (a + b)] }
                })
                .collect();
            let mut labels: Vec<usize> = rows.iter().map(|r| usize::from(r.2)).collect();
            labels[0] = 0;
            labels[1] = 1;
            let s = ScoredSet::from_probs(probs.clone(), labels.clone(), vec![0.5, 0.5]).unwrap();
            let mse = zero_one_mse(&s);
            proptest::prop_assert!((0.0..=1.0).contains(&mse));
            let brier: f64 = probs
                .iter()
                .zip(&labels)
                .map(|(p, &y)| (0..2).map(|k| (p[k] - f64::from(u8::from(k == y))).powi(2)).sum::<f64>())
                .sum::<f64>()
                / probs.len() as f64;
            proptest::prop_assert!((mse - brier / 2.0).abs() < 1e-12);
            proptest::prop_assert!(avg_log_loss(&s).is_finite());
            for k in 0..2 {
                proptest::prop_assert_eq!(lift(&s, k, 1.0).unwrap(), 1.0);
                let curve = lift_curve(&s, k).unwrap();
                proptest::prop_assert_eq!(curve.last().unwrap().0, 1.0);
                for w in curve.windows(2) {
                    proptest::prop_assert!(w[0].0 < w[1].0);
                }
            }
        }
    }
}
