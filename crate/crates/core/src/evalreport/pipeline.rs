use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{mae, per_dataset_win, relative_change};
use crate::dataio::{split_datasets, SplitAssignment, SplitRatios};
use crate::error::{Error, Result};
use crate::fingerprint::{FingerprintConfig, FingerprintTable};
use crate::regress::{
    default_candidates, select_regressor, train, RegressorKind, RegressorSpec, TrainedRegressor,
};
use crate::stats;
use crate::targets::{naive_baseline, PerformanceRecord, TargetStatistic};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub split_seed: u64,
    pub ratios: SplitRatios,
    pub statistics: Vec<TargetStatistic>,
    pub candidates: Vec<RegressorSpec>,
    /// Seed for the randomized regressor families.
    pub model_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            split_seed: 0,
            ratios: SplitRatios::default(),
            statistics: vec![TargetStatistic::Mean, TargetStatistic::Std],
            candidates: default_candidates(),
            model_seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.ratios.validate()?;
        if self.statistics.is_empty() {
            return Err(Error::InvalidConfig("statistics list is empty".into()));
        }
        let mut tags = BTreeSet::new();
        for s in &self.statistics {
            s.validate()?;
            if !tags.insert(s.tag()) {
                return Err(Error::InvalidConfig(format!(
                    "statistic {} listed twice",
                    s.tag()
                )));
            }
        }
        if self.candidates.is_empty() {
            return Err(Error::InvalidConfig(
                "regressor candidate list is empty".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub algorithm: String,
    /// Statistic tag: `mean`, `std`, `p10`, ...
    pub statistic: String,
    pub chosen_regressor_kind: RegressorKind,
    pub chosen_regressor: String,
    pub validation_mae: f64,
    pub baseline_value: f64,
    pub baseline_mae: f64,
    pub model_mae: f64,
    pub relative_change_pct: f64,
    pub per_dataset_wins: usize,
    pub n_train: usize,
    pub n_validation: usize,
    pub n_test: usize,
}

/// Column means over the rows of one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub statistic: String,
    pub n_algorithms: usize,
    pub baseline_mae: f64,
    pub model_mae: f64,
    pub relative_change_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub algorithm: Option<String>,
    pub statistic: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    /// Ordered by algorithm, then by position of the statistic in the config.
    pub rows: Vec<EvaluationRow>,
    pub summary: Vec<SummaryRow>,
    pub split: SplitAssignment,
    pub config: PipelineConfig,
    pub fingerprint_config: FingerprintConfig,
    pub feature_names: Vec<String>,
    pub warnings: Vec<Warning>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(doc)?;
        if report.schema_version != REPORT_SCHEMA_VERSION {
            return Err(Error::SchemaMismatch(format!(
                "report schema version {} is not supported (expected {REPORT_SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Recomputes the summary from the rows.
    pub fn recompute_summary(&self) -> Vec<SummaryRow> {
        summarize(&self.config.statistics, &self.rows)
    }
}

/// The regressor chosen for one (algorithm, statistic).
#[derive(Debug, Clone, PartialEq)]
pub struct PersistedModel {
    pub algorithm: String,
    pub statistic: String,
    pub model: TrainedRegressor,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: EvaluationReport,
    pub models: Vec<PersistedModel>,
}

fn summarize(statistics: &[TargetStatistic], rows: &[EvaluationRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for stat in statistics {
        let tag = stat.tag();
        let selected: Vec<&EvaluationRow> = rows.iter().filter(|r| r.statistic == tag).collect();
        if selected.is_empty() {
            continue;
        }
        let column = |f: fn(&EvaluationRow) -> f64| -> f64 {
            stats::mean(&selected.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        out.push(SummaryRow {
            statistic: tag,
            n_algorithms: selected.len(),
            baseline_mae: column(|r| r.baseline_mae),
            model_mae: column(|r| r.model_mae),
            relative_change_pct: column(|r| r.relative_change_pct),
        });
    }
    out
}

struct Partition<'a> {
    names: Vec<&'a str>,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

fn partition<'a>(
    names: &'a [String],
    targets: &BTreeMap<&str, f64>,
    fingerprints: &BTreeMap<&str, &[f64]>,
) -> Partition<'a> {
    let mut p = Partition {
        names: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
    };
    for name in names {
        if let (Some(&y), Some(x)) = (targets.get(name.as_str()), fingerprints.get(name.as_str())) {
            p.names.push(name);
            p.x.push(x.to_vec());
            p.y.push(y);
        }
    }
    p
}

type TaskResult = std::result::Result<(EvaluationRow, PersistedModel), Warning>;

/// Splits the fingerprinted datasets, then for every (algorithm, statistic)
/// fits each candidate on the training datasets, keeps the one with the
/// lowest validation MAE, and scores it and the naive baseline on the test
/// datasets.
///
/// Algorithms whose records do not cover at least two training, one
/// validation and one test dataset are skipped with a warning.
pub fn run_pipeline(
    fingerprints: &FingerprintTable,
    records: &[PerformanceRecord],
    config: &PipelineConfig,
) -> Result<PipelineOutput> {
    config.validate()?;
    let mut warnings = Vec::new();

    let fp_map: BTreeMap<&str, &[f64]> = fingerprints
        .rows
        .iter()
        .map(|r| (r.dataset.as_str(), r.values.as_slice()))
        .collect();
    if fp_map.len() != fingerprints.rows.len() {
        return Err(Error::InvalidInput(
            "fingerprint table lists a dataset twice".into(),
        ));
    }
    let referenced: BTreeSet<&str> = records.iter().map(|r| r.dataset.as_str()).collect();
    for name in referenced.iter().filter(|d| !fp_map.contains_key(*d)) {
        warnings.push(Warning {
            algorithm: None,
            statistic: None,
            message: format!("dataset {name:?} has results but no fingerprint; ignored"),
        });
    }
    let names: Vec<String> = referenced
        .iter()
        .filter(|d| fp_map.contains_key(*d))
        .map(|d| d.to_string())
        .collect();
    let split = split_datasets(&names, config.split_seed, config.ratios)?;

    let mut by_algorithm: BTreeMap<&str, Vec<&PerformanceRecord>> = BTreeMap::new();
    for r in records {
        by_algorithm
            .entry(r.algorithm.as_str())
            .or_default()
            .push(r);
    }

    let tasks: Vec<(&str, TargetStatistic)> = by_algorithm
        .keys()
        .flat_map(|a| config.statistics.iter().map(move |s| (*a, *s)))
        .collect();

    let results: Vec<TaskResult> = tasks
        .par_iter()
        .map(|&(algorithm, stat)| {
            evaluate_one(
                algorithm,
                stat,
                &by_algorithm[algorithm],
                &split,
                &fp_map,
                config,
            )
        })
        .collect();

    let mut rows = Vec::new();
    let mut models = Vec::new();
    for r in results {
        match r {
            Ok((row, model)) => {
                rows.push(row);
                models.push(model);
            }
            Err(w) => warnings.push(w),
        }
    }
    for w in &warnings {
        log::warn!(
            "{}{}{}",
            w.algorithm
                .as_deref()
                .map(|a| format!("{a}: "))
                .unwrap_or_default(),
            w.statistic
                .as_deref()
                .map(|s| format!("{s}: "))
                .unwrap_or_default(),
            w.message
        );
    }

    let summary = summarize(&config.statistics, &rows);
    Ok(PipelineOutput {
        report: EvaluationReport {
            schema_version: REPORT_SCHEMA_VERSION,
            rows,
            summary,
            split,
            config: config.clone(),
            fingerprint_config: fingerprints.config.clone(),
            feature_names: fingerprints.feature_names.clone(),
            warnings,
        },
        models,
    })
}

fn evaluate_one(
    algorithm: &str,
    stat: TargetStatistic,
    records: &[&PerformanceRecord],
    split: &SplitAssignment,
    fingerprints: &BTreeMap<&str, &[f64]>,
    config: &PipelineConfig,
) -> TaskResult {
    let tag = stat.tag();
    let warn = |message: String| Warning {
        algorithm: Some(algorithm.to_string()),
        statistic: Some(tag.clone()),
        message,
    };

    let mut targets = BTreeMap::new();
    let mut unusable = 0usize;
    for r in records {
        match r.statistic(stat) {
            Ok(v) if v.is_finite() => {
                targets.insert(r.dataset.as_str(), v);
            }
            _ => unusable += 1,
        }
    }
    let train_p = partition(&split.train, &targets, fingerprints);
    let val_p = partition(&split.validation, &targets, fingerprints);
    let test_p = partition(&split.test, &targets, fingerprints);
    if train_p.y.len() < 2 || val_p.y.is_empty() || test_p.y.is_empty() {
        let mut msg = format!(
            "insufficient coverage: {} train, {} validation, {} test datasets (need 2/1/1); skipped",
            train_p.y.len(),
            val_p.y.len(),
            test_p.y.len()
        );
        if unusable > 0 {
            msg.push_str(&format!("; {unusable} records lack this statistic"));
        }
        return Err(warn(msg));
    }

    let train_records: Vec<PerformanceRecord> = records
        .iter()
        .filter(|r| train_p.names.contains(&r.dataset.as_str()))
        .map(|r| (*r).clone())
        .collect();
    let baseline =
        naive_baseline(&train_records, algorithm, stat).map_err(|e| warn(e.to_string()))?;

    let trained: Vec<TrainedRegressor> = config
        .candidates
        .iter()
        .filter_map(|spec| train(spec, &train_p.x, &train_p.y, config.model_seed).ok())
        .collect();
    if trained.is_empty() {
        return Err(warn(format!(
            "no candidate regressor could be fit on {} training datasets; skipped",
            train_p.y.len()
        )));
    }
    let selection =
        select_regressor(&trained, &val_p.x, &val_p.y).map_err(|e| warn(e.to_string()))?;
    let chosen = trained
        .into_iter()
        .nth(selection.chosen_index)
        .expect("index from selection");

    let preds = chosen.predict(&test_p.x).map_err(|e| warn(e.to_string()))?;
    let model_mae = mae(&preds, &test_p.y).map_err(|e| warn(e.to_string()))?;
    let baseline_preds = vec![baseline.value; test_p.y.len()];
    let baseline_mae = mae(&baseline_preds, &test_p.y).map_err(|e| warn(e.to_string()))?;
    let relative_change_pct =
        relative_change(model_mae, baseline_mae).map_err(|e| warn(format!("{e}; skipped")))?;
    let per_dataset_wins = preds
        .iter()
        .zip(&test_p.y)
        .filter(|(p, t)| per_dataset_win(**p, **t, baseline.value))
        .count();

    let row = EvaluationRow {
        algorithm: algorithm.to_string(),
        statistic: tag.clone(),
        chosen_regressor_kind: chosen.kind(),
        chosen_regressor: selection.chosen_label,
        validation_mae: selection.validation_mae,
        baseline_value: baseline.value,
        baseline_mae,
        model_mae,
        relative_change_pct,
        per_dataset_wins,
        n_train: train_p.y.len(),
        n_validation: val_p.y.len(),
        n_test: test_p.y.len(),
    };
    Ok((
        row,
        PersistedModel {
            algorithm: algorithm.to_string(),
            statistic: tag,
            model: chosen,
        },
    ))
}
