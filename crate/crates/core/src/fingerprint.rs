//! Three-level dataset fingerprint.
//!
//! Every training series is summarised by [`instance_fingerprint`], the
//! summaries of one class are aggregated coordinate-wise into a
//! [`ClassFingerprint`], and the class fingerprints are aggregated across
//! classes (std / IQR / range) and extended with eight shape counts into a
//! [`DatasetFingerprint`]. With the default config the result always holds
//! 3 * 12 + 8 = 44 numbers, whatever the number of classes, instances or
//! series length.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataio::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::stats;

/// Number of per-instance statistics.
pub const INSTANCE_LEN: usize = 12;

/// Instance statistics in vector order.
pub const INSTANCE_FEATURES: [&str; INSTANCE_LEN] = [
    "mean",
    "std",
    "min",
    "max",
    "median",
    "iqr",
    "skewness",
    "kurtosis",
    "mean_change",
    "change_deviation",
    "mean_abs_change",
    "autocorr_lag1",
];

/// Dataset shape counts appended after the class aggregations.
pub const META_FEATURES: [&str; 8] = [
    "n_train",
    "n_test",
    "series_length",
    "n_classes",
    "min_per_class",
    "max_per_class",
    "mean_per_class",
    "std_per_class",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceFingerprint {
    pub features: [f64; INSTANCE_LEN],
}

/// Computes the 12 instance statistics of one series (see
/// [`INSTANCE_FEATURES`]).
///
/// Degenerate inputs map to zeros: a constant series has zero std, skewness,
/// kurtosis and autocorrelation; `T = 1` has no changes; `T = 2` has a single
/// change and therefore zero change deviation.
pub fn instance_fingerprint(series: &[f64]) -> InstanceFingerprint {
    let t = series.len();
    let mut f = [0.0; INSTANCE_LEN];
    if t == 0 {
        return InstanceFingerprint { features: f };
    }
    let n = t as f64;
    let mean = series.iter().sum::<f64>() / n;
    let sorted = stats::sorted(series);
    let (lo, hi) = (sorted[0], sorted[t - 1]);
    let constant = lo == hi;

    f[0] = if constant { lo } else { mean };
    f[2] = lo;
    f[3] = hi;
    f[4] = stats::quantile_sorted(&sorted, 0.5);
    f[5] = stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25);

    if !constant {
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in series {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        let ss = m2;
        m2 /= n;
        m3 /= n;
        m4 /= n;
        f[1] = if t > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        if m2 > 0.0 {
            f[6] = m3 / m2.powf(1.5);
            f[7] = m4 / (m2 * m2);
            let lagged: f64 = series
                .windows(2)
                .map(|w| (w[0] - mean) * (w[1] - mean))
                .sum();
            f[11] = lagged / ss;
        }
    }

    if t >= 2 {
        let steps = (t - 1) as f64;
        let mean_change = (series[t - 1] - series[0]) / steps;
        f[8] = mean_change;
        f[10] = series.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / steps;
        if t >= 3 {
            let ss: f64 = series
                .windows(2)
                .map(|w| {
                    let e = w[1] - w[0] - mean_change;
                    e * e
                })
                .sum();
            f[9] = (ss / (t - 2) as f64).sqrt();
        }
    }
    InstanceFingerprint { features: f }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassAggregation {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetAggregation {
    Std,
    Iqr,
    Range,
}

impl DatasetAggregation {
    pub fn name(self) -> &'static str {
        match self {
            DatasetAggregation::Std => "std",
            DatasetAggregation::Iqr => "iqr",
            DatasetAggregation::Range => "range",
        }
    }

    fn apply(self, values: &[f64]) -> f64 {
        match self {
            DatasetAggregation::Std => stats::population_std(values),
            DatasetAggregation::Iqr => stats::iqr(values),
            DatasetAggregation::Range => stats::max(values) - stats::min(values),
        }
    }
}

impl fmt::Display for ClassAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassAggregation::Mean => "mean",
            ClassAggregation::Median => "median",
        })
    }
}

impl FromStr for ClassAggregation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            other => Err(Error::InvalidConfig(format!(
                "unknown class aggregation {other:?} (expected mean or median)"
            ))),
        }
    }
}

impl FromStr for DatasetAggregation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "std" => Ok(Self::Std),
            "iqr" => Ok(Self::Iqr),
            "range" => Ok(Self::Range),
            other => Err(Error::InvalidConfig(format!(
                "unknown dataset aggregation {other:?} (expected std, iqr or range)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintConfig {
    pub class_aggregation: ClassAggregation,
    pub dataset_aggregations: Vec<DatasetAggregation>,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self {
            class_aggregation: ClassAggregation::Mean,
            dataset_aggregations: vec![
                DatasetAggregation::Std,
                DatasetAggregation::Iqr,
                DatasetAggregation::Range,
            ],
        }
    }
}

impl FingerprintConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dataset_aggregations.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one dataset aggregation is required".into(),
            ));
        }
        let mut seen = self.dataset_aggregations.clone();
        seen.sort_by_key(|a| a.name());
        seen.dedup();
        if seen.len() != self.dataset_aggregations.len() {
            return Err(Error::InvalidConfig(
                "dataset aggregations must not repeat".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dataset_aggregations.len() * INSTANCE_LEN + META_FEATURES.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.len());
        for agg in &self.dataset_aggregations {
            for f in INSTANCE_FEATURES {
                names.push(format!("{}.{f}", agg.name()));
            }
        }
        names.extend(META_FEATURES.iter().map(|m| format!("meta.{m}")));
        names
    }

    /// Stable textual form, e.g. `v1;class=mean;dataset=std,iqr,range`.
    pub fn canonical(&self) -> String {
        let aggs: Vec<&str> = self.dataset_aggregations.iter().map(|a| a.name()).collect();
        format!(
            "v1;class={};dataset={}",
            self.class_aggregation,
            aggs.join(",")
        )
    }

    /// Short hex digest of [`canonical`](Self::canonical), used to tie models
    /// to the fingerprint layout they were trained on.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub fn parse_canonical(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unrecognised fingerprint config {s:?}"));
        let mut parts = s.trim().split(';');
        if parts.next() != Some("v1") {
            return Err(bad());
        }
        let class = parts
            .next()
            .and_then(|p| p.strip_prefix("class="))
            .ok_or_else(bad)?;
        let dataset = parts
            .next()
            .and_then(|p| p.strip_prefix("dataset="))
            .ok_or_else(bad)?;
        let cfg = Self {
            class_aggregation: class.parse()?,
            dataset_aggregations: dataset
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFingerprint {
    pub class_label: String,
    pub features: [f64; INSTANCE_LEN],
    pub aggregation: ClassAggregation,
}

/// Coordinate-wise mean or median of a class's instance fingerprints.
pub fn class_fingerprint(
    instances: &[InstanceFingerprint],
    class_label: &str,
    aggregation: ClassAggregation,
) -> Result<ClassFingerprint> {
    if instances.is_empty() {
        return Err(Error::InvalidInput(format!(
            "class {class_label:?} has no instance fingerprints"
        )));
    }
    let mut features = [0.0; INSTANCE_LEN];
    let mut column = Vec::with_capacity(instances.len());
    for (j, out) in features.iter_mut().enumerate() {
        column.clear();
        column.extend(instances.iter().map(|i| i.features[j]));
        *out = match aggregation {
            ClassAggregation::Mean => stats::mean(&column),
            ClassAggregation::Median => stats::median(&column),
        };
    }
    Ok(ClassFingerprint {
        class_label: class_label.to_string(),
        features,
        aggregation,
    })
}

/// Fixed-length dataset description. Holds only aggregated numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFingerprint {
    pub feature_vector: Vec<f64>,
    pub feature_names: Vec<String>,
}

pub fn dataset_fingerprint(
    dataset: &TimeSeriesDataset,
    config: &FingerprintConfig,
) -> Result<DatasetFingerprint> {
    config.validate()?;
    let mut by_class: BTreeMap<&str, Vec<InstanceFingerprint>> = dataset
        .classes
        .iter()
        .map(|c| (c.as_str(), Vec::new()))
        .collect();
    let mut lengths = Vec::with_capacity(dataset.train.len());
    for inst in &dataset.train {
        lengths.push(inst.values.len() as f64);
        by_class
            .entry(inst.label.as_str())
            .or_default()
            .push(instance_fingerprint(&inst.values));
    }
    if dataset.train.is_empty() {
        return Err(Error::EmptyTrainSplit {
            dataset: dataset.name.clone(),
        });
    }

    let mut class_fps = Vec::with_capacity(by_class.len());
    let mut counts = Vec::with_capacity(by_class.len());
    for (label, fps) in &by_class {
        if fps.is_empty() {
            return Err(Error::ClassWithoutTrainingInstances {
                dataset: dataset.name.clone(),
                class: label.to_string(),
            });
        }
        counts.push(fps.len() as f64);
        class_fps.push(class_fingerprint(fps, label, config.class_aggregation)?);
    }

    let mut vector = Vec::with_capacity(config.len());
    let mut column = Vec::with_capacity(class_fps.len());
    for agg in &config.dataset_aggregations {
        for j in 0..INSTANCE_LEN {
            column.clear();
            column.extend(class_fps.iter().map(|c| c.features[j]));
            vector.push(agg.apply(&column));
        }
    }
    vector.extend([
        dataset.train.len() as f64,
        dataset.test.len() as f64,
        stats::median(&lengths),
        counts.len() as f64,
        stats::min(&counts),
        stats::max(&counts),
        stats::mean(&counts),
        stats::population_std(&counts),
    ]);
    debug_assert_eq!(vector.len(), config.len());
    Ok(DatasetFingerprint {
        feature_vector: vector,
        feature_names: config.feature_names(),
    })
}

/// Fingerprints of a corpus. Failures are collected per dataset and do not
/// stop the others.
#[derive(Debug, Default)]
pub struct CorpusFingerprints {
    pub fingerprints: BTreeMap<String, DatasetFingerprint>,
    pub errors: Vec<(String, Error)>,
}

pub fn fingerprint_corpus(
    datasets: &[TimeSeriesDataset],
    config: &FingerprintConfig,
) -> CorpusFingerprints {
    let results: Vec<(String, Result<DatasetFingerprint>)> = datasets
        .par_iter()
        .map(|d| (d.name.clone(), dataset_fingerprint(d, config)))
        .collect();
    let mut out = CorpusFingerprints::default();
    for (name, result) in results {
        match result {
            Ok(_) if out.fingerprints.contains_key(&name) => out.errors.push((
                name.clone(),
                Error::InvalidInput(format!("duplicate dataset name {name:?}")),
            )),
            Ok(fp) => {
                out.fingerprints.insert(name, fp);
            }
            Err(e) => out.errors.push((name, e)),
        }
    }
    out
}

/// Exported fingerprints: the artifact a data owner shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintTable {
    pub config: FingerprintConfig,
    pub feature_names: Vec<String>,
    pub rows: Vec<FingerprintRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintRow {
    pub dataset: String,
    pub values: Vec<f64>,
}

const CSV_MARKER: &str = "# tsfingerprint";

impl FingerprintTable {
    pub fn new(config: FingerprintConfig) -> Self {
        Self {
            feature_names: config.feature_names(),
            config,
            rows: Vec::new(),
        }
    }

    pub fn from_corpus(config: &FingerprintConfig, corpus: &CorpusFingerprints) -> Self {
        let mut table = Self::new(config.clone());
        for (name, fp) in &corpus.fingerprints {
            table.rows.push(FingerprintRow {
                dataset: name.clone(),
                values: fp.feature_vector.clone(),
            });
        }
        table
    }

    pub fn get(&self, dataset: &str) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset)
            .map(|r| r.values.as_slice())
    }

    /// CSV with a leading comment line declaring the config and its hash,
    /// then `dataset,<feature names>` and one row per dataset.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{CSV_MARKER} config={} hash={}\n",
            self.config.canonical(),
            self.config.hash()
        );
        out.push_str("dataset");
        for n in &self.feature_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.dataset);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`to_csv`](Self::to_csv) output. Without the config comment the
    /// default config is assumed and the header must match it.
    pub fn from_csv(doc: &str) -> Result<Self> {
        let mut config = FingerprintConfig::default();
        let mut body = doc;
        if let Some(first) = doc.lines().next() {
            if let Some(rest) = first.strip_prefix(CSV_MARKER) {
                let canonical = rest
                    .split_whitespace()
                    .find_map(|kv| kv.strip_prefix("config="))
                    .ok_or_else(|| {
                        Error::SchemaMismatch("config comment without config=".into())
                    })?;
                config = FingerprintConfig::parse_canonical(canonical)?;
                body = &doc[first.len()..];
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(body.trim_start().as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header.first().map(String::as_str) != Some("dataset") {
            return Err(Error::SchemaMismatch(
                "first column must be 'dataset'".into(),
            ));
        }
        let feature_names = header[1..].to_vec();
        let expected = config.feature_names();
        if feature_names != expected {
            return Err(Error::SchemaMismatch(describe_column_diff(
                &expected,
                &feature_names,
            )));
        }
        let mut table = Self::new(config);
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let values = record
                .iter()
                .skip(1)
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            Error::InvalidInput(format!("fingerprint line {line}: bad value {t:?}"))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(FingerprintRow {
                dataset: record[0].to_string(),
                values,
            });
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(doc)?;
        table.config.validate()?;
        let expected = table.config.feature_names();
        if table.feature_names != expected {
            return Err(Error::SchemaMismatch(describe_column_diff(
                &expected,
                &table.feature_names,
            )));
        }
        if let Some(row) = table.rows.iter().find(|r| r.values.len() != expected.len()) {
            return Err(Error::SchemaMismatch(format!(
                "row {} has {} values, expected {}",
                row.dataset,
                row.values.len(),
                expected.len()
            )));
        }
        Ok(table)
    }
}

/// Human-readable list of missing and unexpected columns.
pub fn describe_column_diff(expected: &[String], actual: &[String]) -> String {
    let missing: Vec<&str> = expected
        .iter()
        .filter(|n| !actual.contains(n))
        .map(String::as_str)
        .collect();
    let extra: Vec<&str> = actual
        .iter()
        .filter(|n| !expected.contains(n))
        .map(String::as_str)
        .collect();
    if missing.is_empty() && extra.is_empty() {
        "columns are present but out of order".to_string()
    } else {
        format!("missing columns {missing:?}, unexpected columns {extra:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::TimeSeriesInstance;

    fn inst(values: &[f64], label: &str) -> TimeSeriesInstance {
        TimeSeriesInstance::new(values.to_vec(), label)
    }

    #[test]
    fn change_deviation_worked_case() {
        let f = instance_fingerprint(&[1.0, 2.0, 4.0]).features;
        assert_eq!(f[8], 1.5);
        // sqrt(((1 - 1.5)^2 + (2 - 1.5)^2) / 1)
        assert_eq!(f[9], 0.5f64.sqrt());
        #[allow(clippy::approx_constant)]
        let printed = 0.70711;
        assert!((f[9] - printed).abs() < 1e-5);
        assert_eq!(f[10], 1.5);
    }

    #[test]
    fn constant_series_is_all_zero_shape() {
        let f = instance_fingerprint(&[5.0; 4]).features;
        assert_eq!(&f[..5], &[5.0, 0.0, 5.0, 5.0, 5.0]);
        assert!(f[5..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn skewness_matches_moments() {
        let f = instance_fingerprint(&[0.0, 0.0, 0.0, 1.0]).features;
        // m2 = 0.1875, m3 = 0.09375
        assert!((f[6] - 0.09375 / 0.1875f64.powf(1.5)).abs() < 1e-12);
        assert!((f[6] - 1.15470).abs() < 1e-5);
    }

    #[test]
    fn short_series_conventions() {
        let one = instance_fingerprint(&[3.0]).features;
        assert!(one[8..].iter().all(|v| *v == 0.0));
        assert_eq!(one[1], 0.0);
        let two = instance_fingerprint(&[1.0, 4.0]).features;
        assert_eq!(two[8], 3.0);
        assert_eq!(two[9], 0.0);
        assert_eq!(two[10], 3.0);
        assert!(two.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn class_aggregations() {
        let zeros = InstanceFingerprint {
            features: [0.0; 12],
        };
        let twos = InstanceFingerprint {
            features: [2.0; 12],
        };
        let c = class_fingerprint(&[zeros, twos], "a", ClassAggregation::Mean).unwrap();
        assert_eq!(c.features, [1.0; 12]);

        let single = instance_fingerprint(&[1.0, 3.0, 2.0]);
        for agg in [ClassAggregation::Mean, ClassAggregation::Median] {
            assert_eq!(
                class_fingerprint(&[single], "a", agg).unwrap().features,
                single.features
            );
        }

        let mk = |v| {
            let mut f = [0.0; 12];
            f[0] = v;
            InstanceFingerprint { features: f }
        };
        let c = class_fingerprint(
            &[mk(1.0), mk(2.0), mk(100.0)],
            "a",
            ClassAggregation::Median,
        )
        .unwrap();
        assert_eq!(c.features[0], 2.0);
        assert!(class_fingerprint(&[], "a", ClassAggregation::Mean).is_err());
    }

    #[test]
    fn single_class_dataset() {
        let ds = TimeSeriesDataset::new(
            "one",
            vec![inst(&[1.0, 2.0], "a"), inst(&[3.0, 1.0, 0.0], "a")],
            vec![inst(&[1.0], "a")],
        )
        .unwrap();
        let fp = dataset_fingerprint(&ds, &FingerprintConfig::default()).unwrap();
        assert_eq!(fp.feature_vector.len(), 44);
        assert!(fp.feature_vector[..36].iter().all(|v| *v == 0.0));
        assert_eq!(
            &fp.feature_vector[36..],
            &[2.0, 1.0, 2.5, 1.0, 2.0, 2.0, 2.0, 0.0]
        );
    }

    #[test]
    fn two_classes_std_is_half_range() {
        let ds = TimeSeriesDataset::new(
            "two",
            vec![
                inst(&[1.0, 2.0, 4.0], "a"),
                inst(&[0.0, -3.0, 7.0, 1.0], "b"),
            ],
            vec![],
        )
        .unwrap();
        let fp = dataset_fingerprint(&ds, &FingerprintConfig::default()).unwrap();
        let v = instance_fingerprint(&[1.0, 2.0, 4.0]).features;
        let w = instance_fingerprint(&[0.0, -3.0, 7.0, 1.0]).features;
        for j in 0..12 {
            let gap = (v[j] - w[j]).abs();
            assert!((fp.feature_vector[24 + j] - gap).abs() <= 1e-12 * gap.max(1.0));
            assert!((fp.feature_vector[j] - gap / 2.0).abs() <= 1e-12 * gap.max(1.0));
        }
    }

    #[test]
    fn default_names() {
        let names = FingerprintConfig::default().feature_names();
        assert_eq!(names.len(), 44);
        assert!(names.contains(&"std.skewness".to_string()));
        assert!(names.contains(&"iqr.mean_change".to_string()));
        assert!(names.contains(&"meta.n_train".to_string()));
    }

    #[test]
    fn class_without_training_instances_is_rejected() {
        let ds =
            TimeSeriesDataset::new("x", vec![inst(&[1.0], "a")], vec![inst(&[1.0], "b")]).unwrap();
        assert!(matches!(
            dataset_fingerprint(&ds, &FingerprintConfig::default()),
            Err(Error::ClassWithoutTrainingInstances { .. })
        ));
    }

    #[test]
    fn corpus_collects_partial_results() {
        assert!(fingerprint_corpus(&[], &FingerprintConfig::default())
            .fingerprints
            .is_empty());
        let good = TimeSeriesDataset::new("g", vec![inst(&[1.0, 2.0], "a")], vec![]).unwrap();
        let mut twin = good.clone();
        twin.name = "twin".into();
        let bad =
            TimeSeriesDataset::new("b", vec![inst(&[1.0], "a")], vec![inst(&[1.0], "z")]).unwrap();
        let out = fingerprint_corpus(&[good, bad, twin], &FingerprintConfig::default());
        assert_eq!(out.fingerprints.len(), 2);
        assert_eq!(out.fingerprints["g"], out.fingerprints["twin"]);
        assert_eq!(out.errors.len(), 1);
        assert_eq!(out.errors[0].0, "b");
    }

    #[test]
    fn config_canonical_round_trip() {
        let cfg = FingerprintConfig {
            class_aggregation: ClassAggregation::Median,
            dataset_aggregations: vec![DatasetAggregation::Range, DatasetAggregation::Std],
        };
        assert_eq!(
            FingerprintConfig::parse_canonical(&cfg.canonical()).unwrap(),
            cfg
        );
        assert_ne!(cfg.hash(), FingerprintConfig::default().hash());
        assert_eq!(cfg.len(), 32);
        let empty = FingerprintConfig {
            class_aggregation: ClassAggregation::Mean,
            dataset_aggregations: vec![],
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn table_csv_and_json_round_trip() {
        let ds = TimeSeriesDataset::new(
            "d1",
            vec![inst(&[0.1, 0.7, 0.3], "a"), inst(&[2.0, 1.0], "b")],
            vec![],
        )
        .unwrap();
        let cfg = FingerprintConfig::default();
        let table = FingerprintTable::from_corpus(&cfg, &fingerprint_corpus(&[ds], &cfg));
        assert_eq!(FingerprintTable::from_csv(&table.to_csv()).unwrap(), table);
        assert_eq!(
            FingerprintTable::from_json(&table.to_json().unwrap()).unwrap(),
            table
        );

        let tampered = table.to_csv().replace("std.skewness", "std.skew");
        let err = FingerprintTable::from_csv(&tampered)
            .unwrap_err()
            .to_string();
        assert!(err.contains("std.skewness") && err.contains("std.skew"));
    }
}
