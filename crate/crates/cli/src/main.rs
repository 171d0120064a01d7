//! `tsfp`: fingerprint datasets, validate results tables, train and evaluate
//! performance regressors, and rank algorithms for unseen fingerprints.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{
    load_config_file, parse_fingerprint_config, parse_list, parse_statistics, ConfigFile, Input,
    Overrides, RunConfig, OUTPUT_DIR_ENV,
};
use tsfingerprint::dataio::{discover_datasets, load_dataset, parse_results, ResultsTable};
use tsfingerprint::evalreport::{
    emit_report, predict_unseen, run_pipeline, write_model_dir, EvaluationReport, PipelineConfig,
    ReportFormat,
};
use tsfingerprint::fingerprint::{fingerprint_corpus, FingerprintConfig, FingerprintTable};
use tsfingerprint::regress::default_candidates;
use tsfingerprint::synthetic::{generate_corpus, SyntheticConfig};
use tsfingerprint::targets::{records_from_results, records_to_csv, TargetStatistic};

#[derive(Parser)]
#[command(
    name = "tsfp",
    version,
    about = "Dataset fingerprints and algorithm performance estimation"
)]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fingerprint every dataset in a directory.
    Fingerprint(FingerprintArgs),
    /// Validate a fold accuracy table and optionally export its targets.
    IngestResults(IngestArgs),
    /// Train, select and evaluate regressors; write report and models.
    Evaluate(EvaluateArgs),
    /// Rank algorithms for new fingerprints using stored models.
    Predict(PredictArgs),
    /// Re-emit a stored evaluation report.
    Report(ReportArgs),
    /// Write a synthetic corpus (datasets and fold accuracies).
    Synthetic(SyntheticArgs),
}

#[derive(Args)]
struct FingerprintArgs {
    /// Directory with <Name>_TRAIN / <Name>_TEST files.
    #[arg(long)]
    datasets: PathBuf,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-dataset error log (default: <out>.errors.log when --out is given).
    #[arg(long)]
    error_log: Option<PathBuf>,
    #[arg(long)]
    class_aggregation: Option<String>,
    /// Comma-separated subset of std,iqr,range.
    #[arg(long)]
    dataset_aggregations: Option<String>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    results: PathBuf,
    /// Write per-(algorithm, dataset) targets as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Statistics to export, e.g. mean,std,p10.
    #[arg(long)]
    stats: Option<String>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    datasets: Option<PathBuf>,
    /// Fingerprint CSV produced by `tsfp fingerprint`.
    #[arg(long)]
    fingerprints: Option<PathBuf>,
    #[arg(long)]
    results: Option<PathBuf>,
    /// Defaults to $TSFP_OUTPUT_DIR, then ./tsfp-out.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    model_dir: Option<PathBuf>,
    /// Split seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    model_seed: Option<u64>,
    /// train,validation,test fractions, e.g. 0.2,0.2,0.6.
    #[arg(long)]
    ratios: Option<String>,
    /// e.g. mean,std,p10.
    #[arg(long)]
    stats: Option<String>,
    #[arg(long)]
    class_aggregation: Option<String>,
    #[arg(long)]
    dataset_aggregations: Option<String>,
    /// Table printed to stdout: markdown or csv.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PredictArgs {
    /// Model directory written by `tsfp evaluate`.
    #[arg(long)]
    models: PathBuf,
    #[arg(long)]
    fingerprints: PathBuf,
    /// CSV output (default: $TSFP_OUTPUT_DIR/predictions.csv, else ./predictions.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// report.json written by `tsfp evaluate`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value = "markdown")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 60)]
    datasets: usize,
    #[arg(long, default_value_t = 5)]
    algorithms: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Finished with some inputs skipped.
const PARTIAL: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Fingerprint(a) => cmd_fingerprint(a),
        Command::IngestResults(a) => cmd_ingest(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Report(a) => cmd_report(a),
        Command::Synthetic(a) => cmd_synthetic(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_file(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

fn fingerprint_dir(
    dir: &Path,
    config: &FingerprintConfig,
) -> Result<(FingerprintTable, Vec<String>)> {
    let files = discover_datasets(dir)?;
    let mut errors = Vec::new();
    let mut datasets = Vec::new();
    for f in &files {
        match load_dataset(f) {
            Ok(d) => datasets.push(d),
            Err(e) => errors.push(format!("{}: {e}", f.name)),
        }
    }
    let corpus = fingerprint_corpus(&datasets, config);
    errors.extend(corpus.errors.iter().map(|(n, e)| format!("{n}: {e}")));
    errors.sort();
    log::info!(
        "fingerprinted {} of {} datasets",
        corpus.fingerprints.len(),
        files.len()
    );
    Ok((FingerprintTable::from_corpus(config, &corpus), errors))
}

fn cmd_fingerprint(a: FingerprintArgs) -> Result<u8> {
    let aggs = a.dataset_aggregations.as_deref().map(parse_list);
    let config = parse_fingerprint_config(a.class_aggregation.as_deref(), aggs.as_deref())
        .map_err(|errs| {
            anyhow!(errs
                .iter()
                .map(|(f, e)| format!("{f}: {e}"))
                .collect::<Vec<_>>()
                .join("; "))
        })?;
    let (table, errors) = fingerprint_dir(&a.datasets, &config)?;
    match &a.out {
        Some(p) => write_file(p, &table.to_csv())?,
        None => print!("{}", table.to_csv()),
    }
    for e in &errors {
        eprintln!("skipped {e}");
    }
    let log_path = a
        .error_log
        .or_else(|| a.out.as_ref().map(|p| p.with_extension("errors.log")));
    if let Some(p) = log_path.filter(|_| !errors.is_empty()) {
        write_file(&p, &(errors.join("\n") + "\n"))?;
    }
    if table.rows.is_empty() {
        eprintln!("no datasets fingerprinted in {}", a.datasets.display());
        return Ok(PARTIAL);
    }
    Ok(if errors.is_empty() { 0 } else { PARTIAL })
}

fn load_records(
    path: &Path,
) -> Result<(ResultsTable, Vec<tsfingerprint::targets::PerformanceRecord>)> {
    let doc = read_file(path, "results file")?;
    let table = parse_results(&doc).with_context(|| format!("results file {}", path.display()))?;
    let records = records_from_results(&table)?;
    Ok((table, records))
}

fn cmd_ingest(a: IngestArgs) -> Result<u8> {
    let (table, records) = load_records(&a.results)?;
    let stats = match &a.stats {
        Some(s) => parse_statistics(&parse_list(s)).map_err(|e| anyhow!("--stats {e}"))?,
        None => vec![TargetStatistic::Mean, TargetStatistic::Std],
    };
    let (n_alg, n_ds, layout) = match &table {
        ResultsTable::Folds(t) => (t.algorithms().len(), t.datasets().len(), "per-fold"),
        ResultsTable::Summary(t) => {
            let algs: std::collections::BTreeSet<_> = t.entries.keys().map(|k| &k.0).collect();
            let dss: std::collections::BTreeSet<_> = t.entries.keys().map(|k| &k.1).collect();
            (algs.len(), dss.len(), "summary")
        }
    };
    println!(
        "{}: {layout} table, {} entries, {n_alg} algorithms, {n_ds} datasets",
        a.results.display(),
        records.len()
    );
    let mut unusable = 0;
    for r in &records {
        for s in &stats {
            if r.statistic(*s).is_err() {
                unusable += 1;
                log::warn!("{} / {}: no {} target", r.algorithm, r.dataset, s.tag());
            }
        }
    }
    if let Some(out) = &a.out {
        let percentiles: Vec<f64> = stats
            .iter()
            .filter_map(|s| match s {
                TargetStatistic::Percentile(p) => Some(*p),
                _ => None,
            })
            .collect();
        write_file(out, &records_to_csv(&records, &percentiles)?)?;
    }
    if unusable > 0 {
        eprintln!("{unusable} (entry, statistic) targets cannot be derived");
        return Ok(PARTIAL);
    }
    Ok(0)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<u8> {
    let file = match &a.config {
        Some(p) => load_config_file(p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(
        file,
        Overrides {
            datasets: a.datasets,
            fingerprints: a.fingerprints,
            results: a.results,
            output_dir: a.output_dir,
            model_dir: a.model_dir,
            seed: a.seed,
            ratios: a.ratios,
            stats: a.stats,
            model_seed: a.model_seed,
            class_aggregation: a.class_aggregation,
            dataset_aggregations: a.dataset_aggregations,
            format: a.format,
        },
    )?;

    let (_, records) = load_records(&cfg.results)?;
    let mut partial = false;
    let table = match &cfg.input {
        Input::Datasets(dir) => {
            let (table, errors) = fingerprint_dir(dir, &cfg.fingerprint)?;
            for e in &errors {
                eprintln!("skipped {e}");
            }
            partial |= !errors.is_empty();
            write_file(&cfg.output_dir.join("fingerprints.csv"), &table.to_csv())?;
            table
        }
        Input::Fingerprints(path) => {
            let table = FingerprintTable::from_csv(&read_file(path, "fingerprint file")?)
                .with_context(|| format!("fingerprint file {}", path.display()))?;
            if table.config != cfg.fingerprint {
                log::info!(
                    "using fingerprint config declared in {}: {}",
                    path.display(),
                    table.config.canonical()
                );
            }
            table
        }
    };

    let pipeline = PipelineConfig {
        split_seed: cfg.split_seed,
        ratios: cfg.ratios,
        statistics: cfg.statistics.clone(),
        candidates: default_candidates(),
        model_seed: cfg.model_seed,
    };
    let out = run_pipeline(&table, &records, &pipeline)?;
    let report = &out.report;
    for w in &report.warnings {
        eprintln!(
            "warning: {}{}",
            match (&w.algorithm, &w.statistic) {
                (Some(a), Some(s)) => format!("{a} ({s}): "),
                (Some(a), None) => format!("{a}: "),
                _ => String::new(),
            },
            w.message
        );
    }
    partial |= !report.warnings.is_empty();

    let dir = &cfg.output_dir;
    write_file(
        &dir.join("report.csv"),
        &emit_report(report, ReportFormat::Csv),
    )?;
    write_file(
        &dir.join("report.md"),
        &emit_report(report, ReportFormat::Markdown),
    )?;
    write_file(&dir.join("report.json"), &report.to_json()?)?;
    write_model_dir(&cfg.model_dir, report, &out.models)?;

    if cfg.format == ReportFormat::Csv {
        print!("{}", emit_report(report, ReportFormat::Csv));
    }
    for s in &report.summary {
        println!(
            "Mean {}: baseline MAE {:.4}, model MAE {:.4}, Δ% {:.2} over {} algorithms",
            s.statistic, s.baseline_mae, s.model_mae, s.relative_change_pct, s.n_algorithms
        );
    }
    if report.rows.is_empty() {
        eprintln!("no (algorithm, statistic) pair could be evaluated");
        return Ok(1);
    }
    Ok(if partial { PARTIAL } else { 0 })
}

fn cmd_predict(a: PredictArgs) -> Result<u8> {
    let table = FingerprintTable::from_csv(&read_file(&a.fingerprints, "fingerprint file")?)
        .with_context(|| format!("fingerprint file {}", a.fingerprints.display()))?;
    let pred = predict_unseen(&a.models, &table)?;
    print!("{}", pred.to_text());
    let out = a.out.unwrap_or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join("predictions.csv")
    });
    write_file(&out, &pred.to_csv())?;
    for w in &pred.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if pred.notice.is_some() || !pred.warnings.is_empty() {
        PARTIAL
    } else {
        0
    })
}

fn cmd_report(a: ReportArgs) -> Result<u8> {
    let report = EvaluationReport::from_json(&read_file(&a.report, "report")?)?;
    let format: ReportFormat = a.format.parse()?;
    let doc = emit_report(&report, format);
    match &a.out {
        Some(p) => write_file(p, &doc)?,
        None => print!("{doc}"),
    }
    Ok(0)
}

fn cmd_synthetic(a: SyntheticArgs) -> Result<u8> {
    let corpus = generate_corpus(&SyntheticConfig {
        n_datasets: a.datasets,
        n_algorithms: a.algorithms,
        n_folds: a.folds,
        seed: a.seed,
        ..Default::default()
    })?;
    corpus.write_to(&a.out.join("datasets"), &a.out.join("results.csv"))?;
    println!(
        "wrote {} datasets and {} result entries to {}",
        corpus.datasets.len(),
        corpus.folds.entries.len(),
        a.out.display()
    );
    Ok(0)
}
