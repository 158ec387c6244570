//! Two-sided t-tests and win/tie/loss verdicts.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::metrics::Metric;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    /// Paired test on per-trial differences.
    #[default]
    Paired,
    /// Unpaired test with unequal variances.
    Welch,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Paired => "paired",
            TestKind::Welch => "welch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Win,
    Tie,
    Loss,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Win => "WIN",
            Verdict::Tie => "TIE",
            Verdict::Loss => "LOSS",
        }
    }

    /// The verdict with baseline and challenger swapped.
    pub fn flip(self) -> Verdict {
        match self {
            Verdict::Win => Verdict::Loss,
            Verdict::Tie => Verdict::Tie,
            Verdict::Loss => Verdict::Win,
        }
    }
}

/// Outcome of comparing challenger `b` against baseline `a` on one metric.
/// WIN means `b` is significantly better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtlCell {
    pub metric: Metric,
    pub verdict: Verdict,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Statistic for `b - a`; infinite when the differences have no spread.
    pub t_statistic: f64,
    pub p_value: f64,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

fn constant(x: &[f64]) -> bool {
    x.iter().all(|&v| v == x[0])
}

fn two_sided_p(t: f64, df: f64) -> Result<f64> {
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidArgument(format!("t distribution: {e}")))?;
    Ok((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Verdict from the statistic's sign and p-value. Zero spread (infinite or
/// undefined statistic) counts as certain when the means differ and as a
/// tie when they do not.
fn cell(metric: Metric, a: &[f64], b: &[f64], t: f64, p: f64, confidence: f64) -> WtlCell {
    let (mean_a, mean_b) = (mean(a), mean(b));
    let verdict = if p < confidence && t != 0.0 {
        let b_lower = t < 0.0;
        if b_lower == metric.lower_is_better() {
            Verdict::Win
        } else {
            Verdict::Loss
        }
    } else {
        Verdict::Tie
    };
    WtlCell {
        metric,
        verdict,
        mean_a,
        mean_b,
        t_statistic: t,
        p_value: p,
    }
}

fn check_lengths(a: &[f64], b: &[f64], paired: bool) -> Result<()> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument(
            "a t-test needs at least two values per side".into(),
        ));
    }
    if paired && a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "t-test values must be finite".into(),
        ));
    }
    Ok(())
}

/// Two-sided paired t-test on `b[i] - a[i]`; significant when
/// `p < confidence`.
pub fn paired_t_test(metric: Metric, a: &[f64], b: &[f64], confidence: f64) -> Result<WtlCell> {
    check_lengths(a, b, true)?;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let n = d.len() as f64;
    let md = mean(&d);
    let (t, p) = if constant(&d) {
        if d[0] == 0.0 {
            (0.0, 1.0)
        } else {
            (d[0].signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = md / (variance(&d) / n).sqrt();
        (t, two_sided_p(t, n - 1.0)?)
    };
    Ok(cell(metric, a, b, t, p, confidence))
}

/// Two-sided Welch t-test of `mean(b) - mean(a)`.
pub fn welch_t_test(metric: Metric, a: &[f64], b: &[f64], confidence: f64) -> Result<WtlCell> {
    check_lengths(a, b, false)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    let diff = if constant(a) && constant(b) {
        b[0] - a[0]
    } else {
        mean(b) - mean(a)
    };
    let (t, p) = if constant(a) && constant(b) {
        if diff == 0.0 {
            (0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = diff / (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
        (t, two_sided_p(t, df)?)
    };
    Ok(cell(metric, a, b, t, p, confidence))
}

pub fn t_test(
    kind: TestKind,
    metric: Metric,
    a: &[f64],
    b: &[f64],
    confidence: f64,
) -> Result<WtlCell> {
    match kind {
        TestKind::Paired => paired_t_test(metric, a, b, confidence),
        TestKind::Welch => welch_t_test(metric, a, b, confidence),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_tie() {
        let a = [0.1, 0.2, 0.3, 0.25];
        for kind in [TestKind::Paired, TestKind::Welch] {
            let c = t_test(kind, Metric::ZeroOneMse, &a, &a, 0.1).unwrap();
            assert_eq!(c.verdict, Verdict::Tie);
            assert_eq!(c.p_value, 1.0);
        }
    }

    #[test]
    fn constant_improvement_is_certain() {
        let a = [0.2; 100];
        let b = [0.1; 100];
        let c = paired_t_test(Metric::ZeroOneMse, &a, &b, 0.1).unwrap();
        assert_eq!(c.verdict, Verdict::Win);
        assert_eq!(c.t_statistic, f64::NEG_INFINITY);
        // Higher is better for AULC, so the same drop is a loss.
        assert_eq!(
            paired_t_test(Metric::Aulc, &a, &b, 0.1).unwrap().verdict,
            Verdict::Loss
        );
        assert_eq!(
            welch_t_test(Metric::ZeroOneMse, &a, &b, 0.1)
                .unwrap()
                .verdict,
            Verdict::Win
        );
    }

    #[test]
    fn known_small_sample() {
        // d = (1, 2, 3): mean 2, sd 1, t = 2 * sqrt(3); two-sided p with 2 df
        // is 1 - t / sqrt(t^2 + 2).
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 2.0, 3.0];
        let c = paired_t_test(Metric::Aulc, &a, &b, 0.1).unwrap();
        let t = 2.0 * 3f64.sqrt();
        assert!((c.t_statistic - t).abs() < 1e-12);
        assert!((c.p_value - (1.0 - t / (t * t + 2.0).sqrt())).abs() < 1e-9);
        assert_eq!(c.verdict, Verdict::Win);
    }

    #[test]
    fn swapping_sides_flips_verdict() {
        let a = [0.3, 0.25, 0.31, 0.28, 0.27];
        let b = [0.2, 0.22, 0.18, 0.21, 0.25];
        for m in Metric::ALL {
            let ab = paired_t_test(m, &a, &b, 0.1).unwrap();
            let ba = paired_t_test(m, &b, &a, 0.1).unwrap();
            assert_eq!(ab.verdict.flip(), ba.verdict);
            assert_ne!(ab.verdict, Verdict::Tie);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(paired_t_test(Metric::Aulc, &[1.0], &[2.0], 0.1).is_err());
        assert!(paired_t_test(Metric::Aulc, &[1.0, 2.0], &[2.0, 3.0, 4.0], 0.1).is_err());
        assert!(welch_t_test(Metric::Aulc, &[1.0, 2.0], &[2.0, 3.0, 4.0], 0.1).is_ok());
        assert!(paired_t_test(Metric::Aulc, &[1.0, f64::NAN], &[2.0, 3.0], 0.1).is_err());
    }
}
