//! Command-line front end: train and apply probability estimation forests,
//! run benchmark and ablation experiments, and emit lift charts.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use petforest::dataset::{filter_classes, read_table_file, Table};
use petforest::harness::report::{
    append_trials_csv, completed_trials, order_results, read_trials_csv, write_lift_tsv,
};
use petforest::harness::run::run_experiment_with;
use petforest::harness::table::win_tie_loss_table;
use petforest::harness::{
    ablation_grid, emit_report, Comparison, DatasetSpec, Direction, EstimatorSpec,
    ExperimentConfig, TestKind,
};
use petforest::metrics::{area_under_curve, lift_curve, Metric, ScoredSet};
use petforest::{Dataset, Error, EstimatorKind, LabelColumn, Model, Smoothing};

#[derive(Parser)]
#[command(
    name = "petforest",
    version,
    about = "Probability estimation forests (B-PETs, EB-PETs, MOB-ESP)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a forest on a labelled CSV file and save the model.
    Train(TrainArgs),
    /// Write per-class probabilities for every row of a CSV file.
    Predict(PredictArgs),
    /// Run the experiment described by a TOML config file.
    Benchmark(BenchmarkArgs),
    /// Run the enhancement add/remove grid on one dataset.
    Ablate(AblateArgs),
    /// Write the lift chart of one class for a labelled CSV file.
    Liftchart(LiftArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file.
    #[arg(long)]
    data: PathBuf,
    /// Label column: zero-based index or header name.
    #[arg(long)]
    label: String,
    /// Keep only two classes, given as original labels `a,b`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    classes: Option<Vec<String>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Bpets,
    Ebpets,
    Mobesp,
}

impl From<KindArg> for EstimatorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bpets => EstimatorKind::Bpets,
            KindArg::Ebpets => EstimatorKind::Ebpets,
            KindArg::Mobesp => EstimatorKind::Mobesp,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 128)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    estimator: KindArg,
    /// EB-PETs: use raw leaf frequencies instead of Laplace smoothing.
    #[arg(long)]
    no_smoothing: bool,
    /// EB-PETs: leave out-of-bag examples out of the leaf counts.
    #[arg(long)]
    no_oob: bool,
    /// Evaluate a random subset of ceil(sqrt(D)) attributes at each node
    /// (default on for MOB-ESP).
    #[arg(long, conflicts_with = "no_random_features")]
    random_features: bool,
    /// Evaluate every attribute at each node.
    #[arg(long)]
    no_random_features: bool,
    /// Weight of out-of-bag examples.
    #[arg(long)]
    alpha: Option<f64>,
    /// EB-PETs: M-estimate smoothing with this strength.
    #[arg(long, conflicts_with = "no_smoothing")]
    m: Option<f64>,
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Label column to drop from the input, if present.
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report directory. Completed trials found there are kept and skipped.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Ignore results already in the report directory.
    #[arg(long)]
    fresh: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Add,
    Remove,
}

#[derive(Clone, Copy, ValueEnum)]
enum TestArg {
    Paired,
    Welch,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    direction: DirectionArg,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 128)]
    trees: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    confidence: f64,
    #[arg(long, value_enum, default_value = "paired")]
    test: TestArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Label column: zero-based index or header name.
    #[arg(long)]
    label: String,
    /// Class: original label, or class index if no label matches.
    #[arg(long)]
    class: String,
    #[arg(long)]
    out: PathBuf,
}

/// Error categories mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Internal(anyhow::Error),
}

fn classify(err: anyhow::Error) -> Failure {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::InvalidArgument(_)) => Failure::Usage(err),
        Some(Error::Io(_)) => Failure::Internal(err),
        Some(_) => Failure::Data(err),
        None => Failure::Internal(err),
    }
}

fn label_column(s: &str) -> LabelColumn {
    s.parse()
        .unwrap_or_else(|e: std::convert::Infallible| match e {})
}

fn load_data(args: &DataArgs) -> Result<Dataset> {
    let label = label_column(&args.label);
    let d = petforest::dataset::load_csv(&args.data, &label)?;
    Ok(match &args.classes {
        Some(c) => filter_classes(&d, (&c[0], &c[1]))?,
        None => d,
    })
}

fn train(args: TrainArgs) -> Result<()> {
    let train = load_data(&args.data)?;
    let mut spec = EstimatorSpec::new(args.estimator_name(), args.estimator.into());
    if args.no_oob {
        spec.include_oob = Some(false);
    }
    if args.no_smoothing {
        spec.smoothing = Some(Smoothing::None);
    }
    if args.m.is_some() {
        spec.smoothing = Some(Smoothing::MEstimate);
        spec.m = args.m;
    }
    if args.random_features {
        spec.random_features = Some(true);
    }
    if args.no_random_features {
        spec.random_features = Some(false);
    }
    spec.alpha = args.alpha;
    let (options, tree) = spec.resolve(args.min_leaf)?;
    let model = Model::fit(&train, args.trees, &tree, options, args.seed)?;
    model.save(&args.out)?;
    eprintln!(
        "trained {} on {} rows, {} features, {} classes; {} trees",
        spec.id,
        train.len(),
        train.num_features(),
        train.num_classes(),
        args.trees
    );
    Ok(())
}

impl TrainArgs {
    fn estimator_name(&self) -> &'static str {
        EstimatorKind::from(self.estimator).name()
    }
}

fn predict(args: PredictArgs) -> Result<()> {
    let model = Model::load(&args.model)?;
    let label = args.label.as_deref().map(label_column);
    let table = read_table_file(&args.data, label.as_ref())?;
    if table.num_features() != model.num_features() {
        return Err(Error::ModelMismatch(format!(
            "model expects {} features, data has {}",
            model.num_features(),
            table.num_features()
        ))
        .into());
    }
    let mut w = petforest_csv_writer(&args.out)?;
    let mut header: Vec<String> = model.class_names.clone();
    header.push("vote".into());
    writeln!(w, "{}", header.join(","))?;
    for row in &table.rows {
        let est = model.predict(row)?;
        let mut cells: Vec<String> = est.probs.iter().map(|p| p.to_string()).collect();
        cells.push(model.class_names[est.predicted_class].clone());
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
        .with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn petforest_csv_writer(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    let f = fs::File::create(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        error: e,
    })?;
    Ok(std::io::BufWriter::new(f))
}

/// Runs `cfg`, resuming from results already in `out` unless `fresh`.
fn run_and_report(
    cfg: &ExperimentConfig,
    out: &Path,
    fresh: bool,
) -> Result<Vec<petforest::harness::TrialResult>> {
    fs::create_dir_all(out).map_err(|e| Error::File {
        path: out.to_path_buf(),
        error: e,
    })?;
    let final_csv = out.join("trials.csv");
    let partial_csv = out.join("trials.partial.csv");
    let mut prior = Vec::new();
    if fresh {
        for p in [&final_csv, &partial_csv] {
            if p.exists() {
                fs::remove_file(p).map_err(|e| Error::File {
                    path: p.clone(),
                    error: e,
                })?;
            }
        }
    } else {
        for p in [&final_csv, &partial_csv] {
            if p.exists() {
                prior.extend(read_trials_csv(p)?);
            }
        }
    }
    order_results(cfg, &mut prior);
    let done = completed_trials(cfg, &prior);
    prior.retain(|r| done.contains(&(r.dataset.clone(), r.trial)));
    if !done.is_empty() {
        eprintln!("resuming: {} completed trials found", done.len());
    }

    let mut sink_error = None;
    let mut output = run_experiment_with(cfg, &done, |rows| {
        if sink_error.is_none() {
            if let Err(e) = append_trials_csv(rows, &partial_csv) {
                sink_error = Some(e);
            }
        }
    })?;
    if let Some(e) = sink_error {
        return Err(e.into());
    }
    output.results.extend(prior);
    order_results(cfg, &mut output.results);
    emit_report(cfg, &output, out)?;
    if partial_csv.exists() {
        fs::remove_file(&partial_csv).map_err(|e| Error::File {
            path: partial_csv.clone(),
            error: e,
        })?;
    }
    for e in &output.errors {
        match e.trial {
            Some(t) => eprintln!("error: dataset {} trial {t}: {}", e.dataset, e.message),
            None => eprintln!("error: dataset {}: {}", e.dataset, e.message),
        }
    }
    if output.results.is_empty() {
        bail!(Error::InvalidDataset("no dataset produced results".into()));
    }
    Ok(output.results)
}

fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    let results = run_and_report(&cfg, &args.out, args.fresh)?;
    for c in cfg.effective_comparisons() {
        print_summary(&results, &c, &cfg)?;
    }
    println!("report written to {}", args.out.display());
    Ok(())
}

fn print_summary(
    results: &[petforest::harness::TrialResult],
    c: &Comparison,
    cfg: &ExperimentConfig,
) -> Result<()> {
    let table = win_tie_loss_table(
        results,
        &c.baseline,
        &c.challenger,
        cfg.test,
        cfg.confidence,
    )?;
    let cells: Vec<String> = table
        .summary
        .iter()
        .map(|s| format!("{} {}/{}/{}", s.metric.label(), s.wins, s.ties, s.losses))
        .collect();
    println!("{} vs {}: {}", c.baseline, c.challenger, cells.join("  "));
    Ok(())
}

fn ablate(args: AblateArgs) -> Result<()> {
    let direction = match args.direction {
        DirectionArg::Add => Direction::Add,
        DirectionArg::Remove => Direction::Remove,
    };
    let (estimators, rows) = ablation_grid(direction);
    let id = args
        .data
        .data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data".into());
    let cfg = ExperimentConfig {
        datasets: vec![DatasetSpec {
            id: Some(id),
            path: args.data.data.clone(),
            label: label_column(&args.data.label),
            classes: args
                .data
                .classes
                .as_ref()
                .map(|c| (c[0].clone(), c[1].clone())),
        }],
        trials: args.trials,
        trees: args.trees,
        test_fraction: args.test_fraction,
        master_seed: args.seed,
        estimators,
        confidence: args.confidence,
        test: match args.test {
            TestArg::Paired => TestKind::Paired,
            TestArg::Welch => TestKind::Welch,
        },
        comparisons: rows.iter().map(|(_, c)| c.clone()).collect(),
        min_leaf_examples: 2,
    };
    cfg.validate()?;
    let results = run_and_report(&cfg, &args.out, true)?;

    let mut md = format!(
        "# Ablation ({direction})\n\nBaseline: {}. Cells are W/T/L for the modified estimator.\n\n| enhancement | estimator |",
        rows[0].1.baseline
    );
    let mut rule = String::from("|---|---|");
    for m in Metric::ALL {
        md.push_str(&format!(" {} |", m.label()));
        rule.push_str(":---:|");
    }
    md.push('\n');
    md.push_str(&rule);
    md.push('\n');
    for (enh, c) in &rows {
        let table = win_tie_loss_table(
            &results,
            &c.baseline,
            &c.challenger,
            cfg.test,
            cfg.confidence,
        )?;
        md.push_str(&format!("| {} | {} |", enh.label(), c.challenger));
        for s in &table.summary {
            md.push_str(&format!(" {}/{}/{} |", s.wins, s.ties, s.losses));
        }
        md.push('\n');
    }
    let path = args.out.join("ablation.md");
    fs::write(&path, &md).map_err(|e| Error::File {
        path: path.clone(),
        error: e,
    })?;
    print!("{md}");
    Ok(())
}

fn liftchart(args: LiftArgs) -> Result<()> {
    let model = Model::load(&args.model)?;
    let table: Table = read_table_file(&args.data, Some(&label_column(&args.label)))?;
    if table.num_features() != model.num_features() {
        return Err(Error::ModelMismatch(format!(
            "model expects {} features, data has {}",
            model.num_features(),
            table.num_features()
        ))
        .into());
    }
    let labels = table.labels_as(&model.class_names)?;
    let class = match model.class_names.iter().position(|c| *c == args.class) {
        Some(k) => k,
        None => match args.class.parse::<usize>() {
            Ok(k) if k < model.num_classes() => k,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown class {:?}; model classes are {:?}",
                    args.class, model.class_names
                ))
                .into())
            }
        },
    };
    let estimates = table
        .rows
        .iter()
        .map(|x| model.predict(x))
        .collect::<petforest::Result<Vec<_>>>()?;
    let k = model.num_classes();
    let scored = ScoredSet::new(estimates, labels, vec![1.0 / k as f64; k])?;
    let points = lift_curve(&scored, class)?;
    write_lift_tsv(&points, &args.out)?;
    println!(
        "class {} ({}): {} points, area {:.4}",
        class,
        model.class_names[class],
        points.len(),
        area_under_curve(&points)
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Benchmark(a) => benchmark(a),
        Command::Ablate(a) => ablate(a),
        Command::Liftchart(a) => liftchart(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli));
    let failure = match outcome {
        Ok(Ok(())) => return ExitCode::SUCCESS,
        Ok(Err(e)) => classify(e),
        Err(_) => return ExitCode::from(3),
    };
    let (code, err) = match failure {
        Failure::Usage(e) => (1, e),
        Failure::Data(e) => (2, e),
        Failure::Internal(e) => (3, e),
    };
    eprintln!("error: {err:#}");
    ExitCode::from(code)
}
