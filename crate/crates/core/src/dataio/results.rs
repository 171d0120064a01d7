use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// (algorithm, dataset)
pub type EntryKey = (String, String);

/// Per-fold accuracies of each (algorithm, dataset) pair, folds in input order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldAccuracyTable {
    pub entries: BTreeMap<EntryKey, Vec<f64>>,
}

impl FoldAccuracyTable {
    pub fn algorithms(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(a, _)| a.as_str()).collect()
    }

    pub fn datasets(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(_, d)| d.as_str()).collect()
    }

    /// Long layout: `algorithm,dataset,fold_index,accuracy`.
    pub fn to_long_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["algorithm", "dataset", "fold_index", "accuracy"])?;
        for ((algorithm, dataset), folds) in &self.entries {
            for (k, acc) in folds.iter().enumerate() {
                w.write_record([algorithm, dataset, &k.to_string(), &acc.to_string()])?;
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryAccuracy {
    pub mean: f64,
    pub std: Option<f64>,
}

/// Pre-aggregated results for exports that carry no per-fold values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub entries: BTreeMap<EntryKey, SummaryAccuracy>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultsTable {
    Folds(FoldAccuracyTable),
    Summary(SummaryTable),
}

enum Layout {
    Long { fold: usize, accuracy: usize },
    Wide,
    Summary { mean: usize, std: Option<usize> },
}

/// Parses a results table in any of the three accepted schemas:
///
/// * long: `algorithm,dataset,fold_index,accuracy`
/// * wide: `algorithm,dataset,acc_0,...,acc_{K-1}`
/// * summary: `algorithm,dataset,mean[,std]`
///
/// The schema is picked from the header row.
pub fn parse_results(document: &str) -> Result<ResultsTable> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(document.as_bytes());
    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let find = |names: &[&str]| header.iter().position(|h| names.contains(&h.as_str()));
    let (Some(alg_col), Some(ds_col)) = (
        find(&["algorithm", "classifier", "h"]),
        find(&["dataset", "problem", "d"]),
    ) else {
        return Err(Error::Results {
            line: 1,
            message: "header must name 'algorithm' and 'dataset' columns".into(),
        });
    };
    let layout = if let Some(fold) = find(&["fold_index", "fold"]) {
        let accuracy = find(&["accuracy", "acc"]).ok_or(Error::Results {
            line: 1,
            message: "long layout needs an 'accuracy' column".into(),
        })?;
        Layout::Long { fold, accuracy }
    } else if let Some(mean) = find(&["mean", "mean_acc"]) {
        Layout::Summary {
            mean,
            std: find(&["std", "std_acc"]),
        }
    } else {
        if alg_col != 0 || ds_col != 1 {
            return Err(Error::Results {
                line: 1,
                message: "wide layout must start with algorithm,dataset".into(),
            });
        }
        Layout::Wide
    };

    let mut folds: BTreeMap<EntryKey, Vec<(usize, f64)>> = BTreeMap::new();
    let mut summary = SummaryTable::default();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| -> Result<&str> {
            record.get(i).ok_or(Error::Results {
                line,
                message: format!("missing column {}", i + 1),
            })
        };
        let key = (field(alg_col)?.to_string(), field(ds_col)?.to_string());
        if key.0.is_empty() || key.1.is_empty() {
            return Err(Error::Results {
                line,
                message: "empty algorithm or dataset name".into(),
            });
        }
        match layout {
            Layout::Long { fold, accuracy } => {
                let idx: usize = field(fold)?.parse().map_err(|_| Error::Results {
                    line,
                    message: format!("bad fold index {:?}", record.get(fold)),
                })?;
                let acc = parse_accuracy(field(accuracy)?, line)?;
                let entry = folds.entry(key.clone()).or_default();
                if entry.iter().any(|(i, _)| *i == idx) {
                    return Err(Error::DuplicateEntry {
                        algorithm: key.0,
                        dataset: key.1,
                        fold: format!(", fold {idx}"),
                        line,
                    });
                }
                entry.push((idx, acc));
            }
            Layout::Wide => {
                if record.len() != header.len() {
                    return Err(Error::RaggedFolds {
                        algorithm: key.0,
                        dataset: key.1,
                        message: format!(
                            "line {line} has {} fold values, header declares {}",
                            record.len().saturating_sub(2),
                            header.len() - 2
                        ),
                    });
                }
                if folds.contains_key(&key) {
                    return Err(Error::DuplicateEntry {
                        algorithm: key.0,
                        dataset: key.1,
                        fold: String::new(),
                        line,
                    });
                }
                let values = (2..record.len())
                    .map(|i| parse_accuracy(&record[i], line).map(|a| (i - 2, a)))
                    .collect::<Result<Vec<_>>>()?;
                folds.insert(key, values);
            }
            Layout::Summary { mean, std } => {
                let m = parse_accuracy(field(mean)?, line)?;
                let s = match std.and_then(|c| record.get(c)).filter(|s| !s.is_empty()) {
                    Some(tok) => {
                        let v: f64 = tok.parse().map_err(|_| Error::Results {
                            line,
                            message: format!("bad std value {tok:?}"),
                        })?;
                        if !v.is_finite() || v < 0.0 {
                            return Err(Error::Results {
                                line,
                                message: format!("std must be finite and >= 0, got {v}"),
                            });
                        }
                        Some(v)
                    }
                    None => None,
                };
                if summary.entries.contains_key(&key) {
                    return Err(Error::DuplicateEntry {
                        algorithm: key.0,
                        dataset: key.1,
                        fold: String::new(),
                        line,
                    });
                }
                summary
                    .entries
                    .insert(key, SummaryAccuracy { mean: m, std: s });
            }
        }
    }

    if let Layout::Summary { .. } = layout {
        return Ok(ResultsTable::Summary(summary));
    }
    let mut table = FoldAccuracyTable::default();
    for (key, values) in folds {
        let mut seen: Vec<usize> = values.iter().map(|(i, _)| *i).collect();
        seen.sort_unstable();
        if seen.iter().enumerate().any(|(pos, i)| pos != *i) {
            return Err(Error::RaggedFolds {
                algorithm: key.0,
                dataset: key.1,
                message: format!("fold indices {seen:?} are not 0..{}", seen.len()),
            });
        }
        table
            .entries
            .insert(key, values.into_iter().map(|(_, a)| a).collect());
    }
    Ok(ResultsTable::Folds(table))
}

/// Parses a per-fold results table (long or wide layout).
pub fn parse_fold_accuracies(document: &str) -> Result<FoldAccuracyTable> {
    match parse_results(document)? {
        ResultsTable::Folds(t) => Ok(t),
        ResultsTable::Summary(_) => Err(Error::Results {
            line: 1,
            message: "expected per-fold accuracies, found a summary (mean/std) table".into(),
        }),
    }
}

fn parse_accuracy(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Results {
        line,
        message: format!("bad accuracy value {token:?}"),
    })?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::AccuracyOutOfRange { line, value: v });
    }
    Ok(v)
}
