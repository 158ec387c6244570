//! Win/tie/loss tables from per-trial results.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harness::run::TrialResult;
use crate::harness::stats::{t_test, TestKind, Verdict, WtlCell};
use crate::metrics::Metric;

/// One dataset's verdicts, one cell per metric in [`Metric::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct WtlRow {
    pub dataset: String,
    pub trials: usize,
    pub cells: Vec<WtlCell>,
}

/// Win/tie/loss counts for one metric across datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WtlSummary {
    pub metric: Metric,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WtlTable {
    pub baseline: String,
    pub challenger: String,
    pub rows: Vec<WtlRow>,
    pub summary: Vec<WtlSummary>,
}

/// Per-dataset metric values of one estimator, keyed by trial.
fn collect<'a>(
    results: &'a [TrialResult],
    estimator: &str,
) -> BTreeMap<&'a str, BTreeMap<usize, &'a TrialResult>> {
    let mut by_dataset: BTreeMap<&str, BTreeMap<usize, &TrialResult>> = BTreeMap::new();
    for r in results.iter().filter(|r| r.estimator == estimator) {
        by_dataset
            .entry(r.dataset.as_str())
            .or_default()
            .insert(r.trial, r);
    }
    by_dataset
}

/// Compares `challenger` against `baseline` on every dataset where either
/// appears. Both must have results for exactly the same trials.
pub fn win_tie_loss_table(
    results: &[TrialResult],
    baseline: &str,
    challenger: &str,
    kind: TestKind,
    confidence: f64,
) -> Result<WtlTable> {
    let base = collect(results, baseline);
    let chal = collect(results, challenger);
    if base.is_empty() && chal.is_empty() {
        return Err(Error::MissingResults(format!(
            "no results for {baseline:?} or {challenger:?}"
        )));
    }
    let mut datasets: Vec<&str> = base.keys().chain(chal.keys()).copied().collect();
    datasets.sort_unstable();
    datasets.dedup();

    let empty = BTreeMap::new();
    let mut rows = Vec::new();
    for ds in datasets {
        let a = base.get(ds).unwrap_or(&empty);
        let b = chal.get(ds).unwrap_or(&empty);
        for (have, lack, name) in [(a, b, challenger), (b, a, baseline)] {
            if let Some(t) = have.keys().find(|t| !lack.contains_key(t)) {
                return Err(Error::MissingResults(format!(
                    "dataset {ds}, trial {t}: no result for estimator {name:?}"
                )));
            }
        }
        let pairs: Vec<(&TrialResult, &TrialResult)> =
            a.iter().map(|(t, ra)| (*ra, b[t])).collect();
        let cells = Metric::ALL
            .iter()
            .map(|&m| {
                let va: Vec<f64> = pairs.iter().map(|(x, _)| x.report.get(m)).collect();
                let vb: Vec<f64> = pairs.iter().map(|(_, y)| y.report.get(m)).collect();
                t_test(kind, m, &va, &vb, confidence)
                    .map_err(|e| Error::MissingResults(format!("dataset {ds}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(WtlRow {
            dataset: ds.to_string(),
            trials: pairs.len(),
            cells,
        });
    }
    let summary = summarize(&rows);
    Ok(WtlTable {
        baseline: baseline.to_string(),
        challenger: challenger.to_string(),
        rows,
        summary,
    })
}

pub fn summarize(rows: &[WtlRow]) -> Vec<WtlSummary> {
    Metric::ALL
        .iter()
        .enumerate()
        .map(|(i, &metric)| {
            let count = |v: Verdict| rows.iter().filter(|r| r.cells[i].verdict == v).count();
            WtlSummary {
                metric,
                wins: count(Verdict::Win),
                ties: count(Verdict::Tie),
                losses: count(Verdict::Loss),
            }
        })
        .collect()
}
