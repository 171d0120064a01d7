//! Regression targets derived from per-fold accuracies, and the constant
//! single-best-solver baseline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataio::{FoldAccuracyTable, ResultsTable, SummaryTable};
use crate::error::{Error, Result};
use crate::stats;

/// Statistic of an algorithm's fold accuracies that a regressor learns to
/// predict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "lowercase")]
pub enum TargetStatistic {
    Mean,
    Std,
    /// Percentile in (0, 100) by linear interpolation; 0 and 100 are
    /// accepted as min and max.
    Percentile(f64),
}

impl TargetStatistic {
    /// Short tag: `mean`, `std`, `p10`, `p2.5`.
    pub fn tag(&self) -> String {
        match self {
            TargetStatistic::Mean => "mean".into(),
            TargetStatistic::Std => "std".into(),
            TargetStatistic::Percentile(p) => format!("p{p}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let TargetStatistic::Percentile(p) = self {
            if !p.is_finite() || !(0.0..=100.0).contains(p) {
                return Err(Error::InvalidConfig(format!(
                    "percentile must lie in [0, 100], got {p}"
                )));
            }
        }
        Ok(())
    }

    /// Clamp range used for display: accuracy-like statistics to [0, 1],
    /// spreads to [0, inf).
    pub fn clip(&self, value: f64) -> f64 {
        match self {
            TargetStatistic::Std => value.max(0.0),
            _ => value.clamp(0.0, 1.0),
        }
    }
}

impl fmt::Display for TargetStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for TargetStatistic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let stat = match s.as_str() {
            "mean" | "mu" => TargetStatistic::Mean,
            "std" | "sigma" => TargetStatistic::Std,
            _ => {
                let p = s
                    .strip_prefix('p')
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "unknown statistic {s:?} (expected mean, std or p<percent>)"
                        ))
                    })?;
                TargetStatistic::Percentile(p)
            }
        };
        stat.validate()?;
        Ok(stat)
    }
}

/// Computes one statistic over a fold vector.
pub fn fold_statistic(folds: &[f64], stat: TargetStatistic) -> Result<f64> {
    if folds.is_empty() {
        return Err(Error::InvalidInput("no fold accuracies".into()));
    }
    stat.validate()?;
    match stat {
        TargetStatistic::Mean => Ok(stats::mean(folds)),
        TargetStatistic::Std => {
            if folds.len() < 2 {
                return Err(Error::InvalidInput(
                    "standard deviation needs at least two folds".into(),
                ));
            }
            Ok(stats::sample_std(folds))
        }
        TargetStatistic::Percentile(p) => Ok(stats::quantile(folds, p / 100.0)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub algorithm: String,
    pub dataset: String,
    /// Empty for summary-only records.
    pub folds: Vec<f64>,
    pub mean_acc: f64,
    /// Sample standard deviation; `None` when it cannot be derived (a single
    /// fold, or a summary row without a std column).
    pub std_acc: Option<f64>,
    pub summary_only: bool,
}

impl PerformanceRecord {
    pub fn statistic(&self, stat: TargetStatistic) -> Result<f64> {
        match stat {
            TargetStatistic::Mean => Ok(self.mean_acc),
            TargetStatistic::Std => self.std_acc.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "({}, {}) has no standard deviation",
                    self.algorithm, self.dataset
                ))
            }),
            TargetStatistic::Percentile(_) if self.summary_only => {
                Err(Error::InvalidInput(format!(
                    "({}, {}) is summary-only; percentiles need fold values",
                    self.algorithm, self.dataset
                )))
            }
            TargetStatistic::Percentile(_) => fold_statistic(&self.folds, stat),
        }
    }
}

pub fn build_records(table: &FoldAccuracyTable) -> Result<Vec<PerformanceRecord>> {
    table
        .entries
        .iter()
        .map(|((algorithm, dataset), folds)| {
            Ok(PerformanceRecord {
                algorithm: algorithm.clone(),
                dataset: dataset.clone(),
                folds: folds.clone(),
                mean_acc: fold_statistic(folds, TargetStatistic::Mean)?,
                std_acc: (folds.len() >= 2).then(|| stats::sample_std(folds)),
                summary_only: false,
            })
        })
        .collect()
}

pub fn build_summary_records(table: &SummaryTable) -> Vec<PerformanceRecord> {
    table
        .entries
        .iter()
        .map(|((algorithm, dataset), s)| PerformanceRecord {
            algorithm: algorithm.clone(),
            dataset: dataset.clone(),
            folds: Vec::new(),
            mean_acc: s.mean,
            std_acc: s.std,
            summary_only: true,
        })
        .collect()
}

pub fn records_from_results(results: &ResultsTable) -> Result<Vec<PerformanceRecord>> {
    match results {
        ResultsTable::Folds(t) => build_records(t),
        ResultsTable::Summary(t) => Ok(build_summary_records(t)),
    }
}

/// Records as CSV: `algorithm,dataset,K,mean_acc,std_acc[,p..]`.
pub fn records_to_csv(records: &[PerformanceRecord], percentiles: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "algorithm".to_string(),
        "dataset".into(),
        "K".into(),
        "mean_acc".into(),
        "std_acc".into(),
    ];
    header.extend(percentiles.iter().map(|p| format!("p{p}")));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.algorithm.clone(),
            r.dataset.clone(),
            r.folds.len().to_string(),
            r.mean_acc.to_string(),
            r.std_acc.map(|s| s.to_string()).unwrap_or_default(),
        ];
        for &p in percentiles {
            row.push(
                r.statistic(TargetStatistic::Percentile(p))
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            );
        }
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Constant prediction for one (algorithm, statistic): the statistic averaged
/// over the algorithm's training-split records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBaseline {
    pub algorithm: String,
    pub statistic: TargetStatistic,
    pub value: f64,
}

impl NaiveBaseline {
    /// The baseline ignores its query.
    pub fn predict(&self, _dataset: &str) -> f64 {
        self.value
    }
}

/// `records` must already be restricted to the training datasets.
pub fn naive_baseline(
    records: &[PerformanceRecord],
    algorithm: &str,
    stat: TargetStatistic,
) -> Result<NaiveBaseline> {
    let values = records
        .iter()
        .filter(|r| r.algorithm == algorithm)
        .map(|r| r.statistic(stat))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no training records for algorithm {algorithm:?}"
        )));
    }
    Ok(NaiveBaseline {
        algorithm: algorithm.to_string(),
        statistic: stat,
        value: stats::mean(&values),
    })
}
