use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesInstance {
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeriesInstance {
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Self {
        Self {
            values,
            label: label.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesDataset {
    pub name: String,
    pub train: Vec<TimeSeriesInstance>,
    pub test: Vec<TimeSeriesInstance>,
    /// Distinct labels of both splits, sorted.
    pub classes: Vec<String>,
}

impl TimeSeriesDataset {
    /// Builds a dataset and collects its class set. Fails on an empty
    /// training split or non-finite values.
    pub fn new(
        name: impl Into<String>,
        train: Vec<TimeSeriesInstance>,
        test: Vec<TimeSeriesInstance>,
    ) -> Result<Self> {
        let name = name.into();
        if train.is_empty() {
            return Err(Error::EmptyTrainSplit { dataset: name });
        }
        for (split, instances) in [("train", &train), ("test", &test)] {
            for (i, inst) in instances.iter().enumerate() {
                if inst.values.is_empty() {
                    return Err(Error::MalformedLine {
                        dataset: name,
                        split: split.into(),
                        line: i + 1,
                        message: "instance has no values".into(),
                    });
                }
                if let Some(pos) = inst.values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::InvalidValue {
                        dataset: name,
                        split: split.into(),
                        line: i + 1,
                        position: pos + 1,
                        token: inst.values[pos].to_string(),
                    });
                }
            }
        }
        let classes: BTreeSet<String> = train
            .iter()
            .chain(test.iter())
            .map(|i| i.label.clone())
            .collect();
        Ok(Self {
            name,
            train,
            test,
            classes: classes.into_iter().collect(),
        })
    }

    /// Canonical CSV: one instance per row, values then label.
    pub fn split_to_csv(instances: &[TimeSeriesInstance]) -> String {
        let mut out = String::new();
        for inst in instances {
            for v in &inst.values {
                let _ = write!(out, "{v},");
            }
            out.push_str(&inst.label);
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> (String, String) {
        (
            Self::split_to_csv(&self.train),
            Self::split_to_csv(&self.test),
        )
    }
}

/// Parses a train/test pair in either the sectioned `.ts` layout (detected by
/// an `@data` line) or plain CSV with the label in the last column.
pub fn parse_ts_dataset(train_doc: &str, test_doc: &str, name: &str) -> Result<TimeSeriesDataset> {
    let train = parse_split(train_doc, name, "train")?;
    let test = parse_split(test_doc, name, "test")?;
    TimeSeriesDataset::new(name, train, test)
}

fn is_ts_format(doc: &str) -> bool {
    doc.lines().any(|l| l.trim().eq_ignore_ascii_case("@data"))
}

fn parse_split(doc: &str, dataset: &str, split: &str) -> Result<Vec<TimeSeriesInstance>> {
    let ts = is_ts_format(doc);
    let mut in_data = !ts;
    let mut out = Vec::new();
    for (idx, raw) in doc.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if ts && !in_data {
            if line.starts_with('@') {
                if line.eq_ignore_ascii_case("@data") {
                    in_data = true;
                }
                continue;
            }
            return Err(Error::MalformedLine {
                dataset: dataset.into(),
                split: split.into(),
                line: line_no,
                message: "expected a header line before @data".into(),
            });
        }
        let malformed = |message: &str| Error::MalformedLine {
            dataset: dataset.into(),
            split: split.into(),
            line: line_no,
            message: message.into(),
        };
        let (values_part, label) = if ts {
            let mut parts = line.split(':');
            let values = parts.next().unwrap_or_default();
            let label = parts
                .next()
                .ok_or_else(|| malformed("missing ':' before class label"))?;
            if parts.next().is_some() {
                return Err(malformed("multivariate series are not supported"));
            }
            (values, label.trim())
        } else {
            match line.rfind(',') {
                Some(pos) => (&line[..pos], line[pos + 1..].trim()),
                None => {
                    return Err(malformed(
                        "expected comma-separated values followed by a label",
                    ))
                }
            }
        };
        if label.is_empty() {
            return Err(malformed("empty class label"));
        }
        let mut values = Vec::new();
        for (pos, token) in values_part.split(',').enumerate() {
            let token = token.trim();
            let invalid = || Error::InvalidValue {
                dataset: dataset.into(),
                split: split.into(),
                line: line_no,
                position: pos + 1,
                token: token.into(),
            };
            let v: f64 = token.parse().map_err(|_| invalid())?;
            if !v.is_finite() {
                return Err(invalid());
            }
            values.push(v);
        }
        out.push(TimeSeriesInstance::new(values, label));
    }
    Ok(out)
}

/// Train/test file pair of one dataset found on disk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DatasetFiles {
    pub name: String,
    pub train: PathBuf,
    pub test: PathBuf,
}

const EXTENSIONS: [&str; 3] = ["ts", "csv", "txt"];

/// Finds `<Name>_TRAIN.<ext>` / `<Name>_TEST.<ext>` pairs directly in `dir` or
/// one level below it (the UCR archive layout). Sorted by name.
pub fn discover_datasets(dir: &Path) -> Result<Vec<DatasetFiles>> {
    let mut found = Vec::new();
    let mut dirs = vec![dir.to_path_buf()];
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.path().is_dir() {
            dirs.push(entry.path());
        }
    }
    for d in dirs {
        let entries = fs::read_dir(&d).map_err(|e| Error::io(&d, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&d, e))?.path();
            let (Some(stem), Some(ext)) = (
                path.file_stem().and_then(|s| s.to_str()),
                path.extension().and_then(|s| s.to_str()),
            ) else {
                continue;
            };
            if !EXTENSIONS.contains(&ext.to_ascii_lowercase().as_str()) {
                continue;
            }
            let Some(name) = stem.strip_suffix("_TRAIN") else {
                continue;
            };
            let test = path.with_file_name(format!("{name}_TEST.{ext}"));
            if test.is_file() {
                found.push(DatasetFiles {
                    name: name.to_string(),
                    train: path.clone(),
                    test,
                });
            } else {
                log::warn!("{}: no matching _TEST file", path.display());
            }
        }
    }
    found.sort();
    found.dedup_by(|a, b| a.name == b.name);
    Ok(found)
}

pub fn load_dataset(files: &DatasetFiles) -> Result<TimeSeriesDataset> {
    let train = fs::read_to_string(&files.train).map_err(|e| Error::io(&files.train, e))?;
    let test = fs::read_to_string(&files.test).map_err(|e| Error::io(&files.test, e))?;
    parse_ts_dataset(&train, &test, &files.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_csv_pair() {
        let doc = "1.0,2.0,4.0,A\n0.0,0.0,0.0,B\n";
        let ds = parse_ts_dataset(doc, doc, "toy").unwrap();
        assert_eq!(ds.train.len(), 2);
        assert_eq!(ds.test.len(), 2);
        assert_eq!(ds.classes, vec!["A", "B"]);
        assert_eq!(ds.train[0].values, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn parses_ts_sections() {
        let doc = "# comment\n@problemName Toy\n@univariate true\n@classLabel true 1 2\n@data\n1.0,2.0:1\n";
        let ds = parse_ts_dataset(doc, "", "toy").unwrap();
        assert_eq!(ds.train.len(), 1);
        assert_eq!(ds.train[0].values, vec![1.0, 2.0]);
        assert_eq!(ds.train[0].label, "1");
        assert!(ds.test.is_empty());
    }

    #[test]
    fn rejects_nan_with_position() {
        let err = parse_ts_dataset("1.0,2.0,A\n1.0,NaN,B\n", "", "bad").unwrap_err();
        match err {
            Error::InvalidValue {
                dataset,
                line,
                position,
                ..
            } => {
                assert_eq!(dataset, "bad");
                assert_eq!(line, 2);
                assert_eq!(position, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_ts_dataset("@data\n1,?:a\n", "", "m").is_err());
        assert!(parse_ts_dataset("1,inf,a\n", "", "m").is_err());
        assert!(parse_ts_dataset("1,,a\n", "", "m").is_err());
    }

    #[test]
    fn rejects_malformed_and_empty() {
        assert!(matches!(
            parse_ts_dataset("@data\n1.0,2.0\n", "", "x"),
            Err(Error::MalformedLine { line: 2, .. })
        ));
        assert!(matches!(
            parse_ts_dataset("@data\n1,2:3:a\n", "", "x"),
            Err(Error::MalformedLine { .. })
        ));
        assert!(matches!(
            parse_ts_dataset("", "1,a\n", "x"),
            Err(Error::EmptyTrainSplit { .. })
        ));
    }

    #[test]
    fn accepts_variable_lengths() {
        let ds = parse_ts_dataset("1,a\n1,2,3,b\n", "", "v").unwrap();
        assert_eq!(ds.train[1].values.len(), 3);
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec(
            (prop::collection::vec(-1e6f64..1e6, 1..12), "[a-z][a-z0-9]{0,4}"), 1..10)
        ) {
            let train: Vec<_> = rows.iter().map(|(v, l)| TimeSeriesInstance::new(v.clone(), l.clone())).collect();
            let ds = TimeSeriesDataset::new("rt", train.clone(), train).unwrap();
            let (a, b) = ds.to_csv();
            let back = parse_ts_dataset(&a, &b, "rt").unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
