//! Report files.
//!
//! `emit_report` writes into one directory:
//!
//! - `trials.csv`: one row per (dataset, trial, estimator) with columns
//!   `dataset,trial,estimator,zero_one_mse,av_log_loss,aulc,delta_acc,per_class_aulc,partition_digest,forest_digest`.
//!   `per_class_aulc` holds the class areas joined by `;`. Floats are
//!   written in shortest round-trip form.
//! - `timings.csv`: `dataset,trial,estimator,seconds` (wall clock, so not
//!   reproducible; kept apart from `trials.csv` for that reason).
//! - `errors.csv`: `dataset,trial,message`; `trial` is empty for failures
//!   that hit a whole dataset.
//! - `summary.md`: run settings, label mappings, per-dataset means and one
//!   win/tie/loss table per comparison.
//! - `lift/<dataset>__<estimator>__class<k>.tsv`: lift-chart points from
//!   trial 0, columns `v` and `lift`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::run::{ExperimentOutput, LabelMap, LiftData, RunError, TrialResult};
use crate::harness::table::{win_tie_loss_table, WtlTable};
use crate::metrics::{Metric, MetricReport};
use crate::seed::SEED_SCHEME;

pub const TRIALS_HEADER: [&str; 10] = [
    "dataset",
    "trial",
    "estimator",
    "zero_one_mse",
    "av_log_loss",
    "aulc",
    "delta_acc",
    "per_class_aulc",
    "partition_digest",
    "forest_digest",
];

fn trial_record(r: &TrialResult) -> Vec<String> {
    let per_class: Vec<String> = r
        .report
        .per_class_aulc
        .iter()
        .map(|v| v.to_string())
        .collect();
    vec![
        r.dataset.clone(),
        r.trial.to_string(),
        r.estimator.clone(),
        r.report.zero_one_mse.to_string(),
        r.report.av_log_loss.to_string(),
        r.report.aulc.to_string(),
        r.report.delta_acc.to_string(),
        per_class.join(";"),
        r.partition_digest.clone(),
        r.forest_digest.clone(),
    ]
}

pub fn write_trials_csv(results: &[TrialResult], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRIALS_HEADER)?;
    for r in results {
        w.write_record(trial_record(r))?;
    }
    w.flush().map_err(|e| Error::file(path, e))
}

/// Appends rows, writing the header first if the file is new or empty.
pub fn append_trials_csv(results: &[TrialResult], path: &Path) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::file(path, e))?;
    let fresh = file.metadata().map_err(|e| Error::file(path, e))?.len() == 0;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(TRIALS_HEADER)?;
    }
    for r in results {
        w.write_record(trial_record(r))?;
    }
    w.flush().map_err(|e| Error::file(path, e))
}

/// Reads a `trials.csv` back; durations are zero.
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialResult>> {
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    if reader.headers()?.iter().ne(TRIALS_HEADER) {
        return Err(Error::InvalidDataset(format!(
            "{}: unexpected trials header",
            path.display()
        )));
    }
    let bad = |line: u64, what: &str| {
        Error::InvalidDataset(format!("{} line {line}: bad {what}", path.display()))
    };
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| bad(line, TRIALS_HEADER[i]))
        };
        let per_class_aulc = rec[7]
            .split(';')
            .map(|v| v.parse::<f64>().map_err(|_| bad(line, "per_class_aulc")))
            .collect::<Result<Vec<f64>>>()?;
        out.push(TrialResult {
            dataset: rec[0].to_string(),
            trial: rec[1].parse().map_err(|_| bad(line, "trial"))?,
            estimator: rec[2].to_string(),
            report: MetricReport {
                zero_one_mse: num(3)?,
                av_log_loss: num(4)?,
                aulc: num(5)?,
                delta_acc: num(6)?,
                per_class_aulc,
            },
            partition_digest: rec[8].to_string(),
            forest_digest: rec[9].to_string(),
            duration: Duration::ZERO,
        });
    }
    Ok(out)
}

/// (dataset, trial) pairs that have a result for every configured
/// estimator.
pub fn completed_trials(
    cfg: &ExperimentConfig,
    results: &[TrialResult],
) -> BTreeSet<(String, usize)> {
    let mut seen: BTreeMap<(String, usize), BTreeSet<&str>> = BTreeMap::new();
    for r in results {
        seen.entry((r.dataset.clone(), r.trial))
            .or_default()
            .insert(r.estimator.as_str());
    }
    seen.into_iter()
        .filter(|(_, ests)| cfg.estimators.iter().all(|e| ests.contains(e.id.as_str())))
        .map(|(k, _)| k)
        .collect()
}

/// Sorts by dataset (configuration order), trial, then estimator
/// (configuration order), and drops duplicate (dataset, trial, estimator) rows and rows for unknown
/// datasets or estimators.
pub fn order_results(cfg: &ExperimentConfig, results: &mut Vec<TrialResult>) {
    let ds: BTreeMap<String, usize> = cfg
        .datasets
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id(), i))
        .collect();
    let es: BTreeMap<&str, usize> = cfg
        .estimators
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();
    results.retain(|r| ds.contains_key(&r.dataset) && es.contains_key(r.estimator.as_str()));
    let key = |r: &TrialResult| (ds[&r.dataset], r.trial, es[r.estimator.as_str()]);
    results.sort_by_key(key);
    results.dedup_by_key(|r| key(r));
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Mean of each metric per (dataset, estimator).
pub fn metric_means(results: &[TrialResult]) -> BTreeMap<(String, String), [f64; 4]> {
    let mut acc: BTreeMap<(String, String), ([f64; 4], usize)> = BTreeMap::new();
    for r in results {
        let e = acc
            .entry((r.dataset.clone(), r.estimator.clone()))
            .or_insert(([0.0; 4], 0));
        for (i, m) in Metric::ALL.iter().enumerate() {
            e.0[i] += r.report.get(*m);
        }
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (sum, n))| (k, sum.map(|s| s / n as f64)))
        .collect()
}

fn wtl_markdown(table: &WtlTable, out: &mut String) {
    let _ = writeln!(
        out,
        "## {} (baseline) vs {} (challenger)\n",
        table.baseline, table.challenger
    );
    let mut header = String::from("| dataset | trials |");
    let mut rule = String::from("|---|---:|");
    for m in Metric::ALL {
        let _ = write!(
            header,
            " {} {} | {} {} | {} |",
            m.label(),
            table.baseline,
            m.label(),
            table.challenger,
            m.label()
        );
        rule.push_str("---:|---:|:---:|");
    }
    let _ = writeln!(out, "{header}\n{rule}");
    for row in &table.rows {
        let _ = write!(out, "| {} | {} |", row.dataset, row.trials);
        for c in &row.cells {
            let _ = write!(
                out,
                " {} | {} | {} |",
                fmt4(c.mean_a),
                fmt4(c.mean_b),
                c.verdict.name()
            );
        }
        out.push('\n');
    }
    let _ = write!(out, "| **W/T/L** | |");
    for s in &table.summary {
        let _ = write!(out, " | | {}/{}/{} |", s.wins, s.ties, s.losses);
    }
    out.push_str("\n\n");
}

/// The markdown summary. Depends only on the configuration and the
/// reproducible parts of the results.
pub fn render_summary(
    cfg: &ExperimentConfig,
    results: &[TrialResult],
    label_maps: &[LabelMap],
    errors: &[RunError],
) -> String {
    let mut out = String::from("# Experiment summary\n\n");
    let _ = writeln!(out, "- trials per dataset: {}", cfg.trials);
    let _ = writeln!(out, "- trees per forest: {}", cfg.trees);
    let _ = writeln!(out, "- test fraction: {}", cfg.test_fraction);
    let _ = writeln!(out, "- master seed: {}", cfg.master_seed);
    let _ = writeln!(
        out,
        "- trial seed: derive(derive(master_seed, fnv1a64(dataset id)), trial); holdout stream derive(trial_seed, 0), forest seed derive(trial_seed, 1), tree t seed derive(forest_seed, t)"
    );
    let _ = writeln!(out, "- derive(parent, key): {SEED_SCHEME}");
    let _ = writeln!(
        out,
        "- significance: two-sided {} t-test on per-trial values; a difference counts when p < {} (the confidence setting is read as the significance level)",
        cfg.test.name(),
        cfg.confidence
    );
    let _ = writeln!(
        out,
        "- verdicts are for the challenger: WIN means significantly lower 0/1-MSE or AvLL, or significantly higher AULC or ΔAcc"
    );
    let _ = writeln!(out, "- AvLL is in bits\n");

    if !label_maps.is_empty() {
        out.push_str("## Label mapping\n\n| dataset | class | label |\n|---|---:|---|\n");
        for m in label_maps {
            for (i, name) in m.class_names.iter().enumerate() {
                let _ = writeln!(out, "| {} | {i} | {name} |", m.dataset);
            }
        }
        out.push('\n');
    }

    let means = metric_means(results);
    let datasets: Vec<String> = {
        let mut seen = Vec::new();
        for r in results {
            if !seen.contains(&r.dataset) {
                seen.push(r.dataset.clone());
            }
        }
        seen
    };
    if !datasets.is_empty() {
        out.push_str("## Mean metrics\n\n");
        let mut header = String::from("| dataset |");
        let mut rule = String::from("|---|");
        for m in Metric::ALL {
            for e in &cfg.estimators {
                let _ = write!(header, " {} {} |", m.label(), e.id);
                rule.push_str("---:|");
            }
        }
        let _ = writeln!(out, "{header}\n{rule}");
        for ds in &datasets {
            let _ = write!(out, "| {ds} |");
            for i in 0..Metric::ALL.len() {
                for e in &cfg.estimators {
                    match means.get(&(ds.clone(), e.id.clone())) {
                        Some(v) => {
                            let _ = write!(out, " {} |", fmt4(v[i]));
                        }
                        None => out.push_str(" |"),
                    }
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }

    for c in cfg.effective_comparisons() {
        match win_tie_loss_table(
            results,
            &c.baseline,
            &c.challenger,
            cfg.test,
            cfg.confidence,
        ) {
            Ok(table) => wtl_markdown(&table, &mut out),
            Err(e) => {
                let _ = writeln!(
                    out,
                    "## {} vs {}\n\nnot available: {e}\n",
                    c.baseline, c.challenger
                );
            }
        }
    }

    if !errors.is_empty() {
        out.push_str("## Errors\n\n");
        for e in errors {
            match e.trial {
                Some(t) => {
                    let _ = writeln!(out, "- {} trial {t}: {}", e.dataset, e.message);
                }
                None => {
                    let _ = writeln!(out, "- {}: {}", e.dataset, e.message);
                }
            }
        }
        out.push('\n');
    }
    out
}

fn write_lift(lift: &LiftData, dir: &Path) -> Result<()> {
    let path = dir.join(format!(
        "{}__{}__class{}.tsv",
        lift.dataset, lift.estimator, lift.class
    ));
    write_lift_tsv(&lift.points, &path)
}

pub fn write_lift_tsv(points: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut text = String::from("v\tlift\n");
    for (v, l) in points {
        let _ = writeln!(text, "{v}\t{l}");
    }
    fs::write(path, text).map_err(|e| Error::file(path, e))
}

/// Writes every report file into `dir`, creating it if needed.
pub fn emit_report(cfg: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    write_trials_csv(&out.results, &dir.join("trials.csv"))?;

    let timings = dir.join("timings.csv");
    let mut w = csv::Writer::from_path(&timings)?;
    w.write_record(["dataset", "trial", "estimator", "seconds"])?;
    for r in &out.results {
        w.write_record([
            r.dataset.clone(),
            r.trial.to_string(),
            r.estimator.clone(),
            format!("{:.6}", r.duration.as_secs_f64()),
        ])?;
    }
    w.flush().map_err(|e| Error::file(&timings, e))?;

    let errors = dir.join("errors.csv");
    let mut w = csv::Writer::from_path(&errors)?;
    w.write_record(["dataset", "trial", "message"])?;
    for e in &out.errors {
        let trial = e.trial.map(|t| t.to_string()).unwrap_or_default();
        w.write_record([e.dataset.as_str(), trial.as_str(), e.message.as_str()])?;
    }
    w.flush().map_err(|e| Error::file(&errors, e))?;

    let summary = dir.join("summary.md");
    fs::write(
        &summary,
        render_summary(cfg, &out.results, &out.label_maps, &out.errors),
    )
    .map_err(|e| Error::file(&summary, e))?;

    let lift_dir = dir.join("lift");
    fs::create_dir_all(&lift_dir).map_err(|e| Error::file(&lift_dir, e))?;
    for l in &out.lift {
        write_lift(l, &lift_dir)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorKind;
    use crate::harness::config::EstimatorSpec;

    fn result(ds: &str, trial: usize, est: &str, v: f64) -> TrialResult {
        TrialResult {
            dataset: ds.into(),
            trial,
            estimator: est.into(),
            report: MetricReport {
                zero_one_mse: v,
                av_log_loss: 1.0 / 3.0 + v,
                aulc: 1.1 + v,
                delta_acc: -v / 7.0,
                per_class_aulc: vec![1.0 + v, 1.2 - v],
            },
            partition_digest: "p".into(),
            forest_digest: "f".into(),
            duration: Duration::from_millis(5),
        }
    }

    fn cfg() -> ExperimentConfig {
        let mut cfg = ExperimentConfig {
            estimators: vec![
                EstimatorSpec::new("a", EstimatorKind::Bpets),
                EstimatorSpec::new("b", EstimatorKind::Mobesp),
            ],
            ..Default::default()
        };
        for id in ["x", "y"] {
            cfg.datasets.push(crate::harness::config::DatasetSpec {
                id: Some(id.into()),
                path: format!("{id}.csv").into(),
                label: crate::dataset::LabelColumn::Index(0),
                classes: None,
            });
        }
        cfg
    }

    fn results() -> Vec<TrialResult> {
        let mut rs = Vec::new();
        for ds in ["x", "y"] {
            for t in 0..4 {
                rs.push(result(ds, t, "a", 0.2 + 0.013 * t as f64));
                rs.push(result(ds, t, "b", 0.1 + 0.007 * (t * t) as f64));
            }
        }
        rs
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trials.csv");
        let rs = results();
        write_trials_csv(&rs, &path).unwrap();
        let back = read_trials_csv(&path).unwrap();
        assert_eq!(back.len(), rs.len());
        for (a, b) in rs.iter().zip(&back) {
            assert_eq!(a.report, b.report);
            assert_eq!(
                (&a.dataset, a.trial, &a.estimator),
                (&b.dataset, b.trial, &b.estimator)
            );
        }
        let c = cfg();
        assert_eq!(
            render_summary(&c, &rs, &[], &[]),
            render_summary(&c, &back, &[], &[])
        );
    }

    #[test]
    fn append_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("partial.csv");
        let rs = results();
        append_trials_csv(&rs[..3], &path).unwrap();
        append_trials_csv(&rs[3..], &path).unwrap();
        assert_eq!(read_trials_csv(&path).unwrap().len(), rs.len());
    }

    #[test]
    fn summary_shape() {
        let text = render_summary(&cfg(), &results(), &[], &[]);
        let table: Vec<&str> = text
            .lines()
            .skip_while(|l| !l.starts_with("## a (baseline)"))
            .filter(|l| l.starts_with('|'))
            .collect();
        // Header, rule, two datasets, summary row.
        assert_eq!(table.len(), 5);
        assert_eq!(table[2].matches('|').count(), 3 + 4 * 3);
        assert!(text.contains("p < 0.1"));
        assert!(text.contains("paired"));
    }

    #[test]
    fn completed_and_ordering() {
        let c = cfg();
        let mut rs = results();
        rs.retain(|r| !(r.dataset == "y" && r.trial == 1 && r.estimator == "b"));
        let done = completed_trials(&c, &rs);
        assert_eq!(done.len(), 7);
        assert!(!done.contains(&("y".to_string(), 1)));
        rs.reverse();
        rs.push(result("x", 0, "a", 0.9));
        rs.push(result("zzz", 0, "a", 0.9));
        order_results(&c, &mut rs);
        assert_eq!(rs.len(), 15);
        assert_eq!(
            (
                rs[0].dataset.as_str(),
                rs[0].trial,
                rs[0].estimator.as_str()
            ),
            ("x", 0, "a")
        );
        assert_eq!(rs[1].estimator, "b");
    }
}
