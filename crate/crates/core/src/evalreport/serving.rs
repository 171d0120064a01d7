use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pipeline::{EvaluationReport, PersistedModel};
use crate::error::{Error, Result};
use crate::fingerprint::{describe_column_diff, FingerprintTable};
use crate::regress::TrainedRegressor;
use crate::targets::TargetStatistic;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub algorithm: String,
    pub statistic: String,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub schema_version: u32,
    pub fingerprint_config: String,
    pub fingerprint_config_hash: String,
    pub split_seed: u64,
    pub model_seed: u64,
    pub feature_names: Vec<String>,
    pub statistics: Vec<String>,
    pub models: Vec<ManifestEntry>,
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '.' | '+') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `<algorithm>__<statistic>.json` per model plus `manifest.json`.
pub fn write_model_dir(
    dir: &Path,
    report: &EvaluationReport,
    models: &[PersistedModel],
) -> Result<ModelManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(models.len());
    let mut used = BTreeSet::new();
    for m in models {
        let file = format!(
            "{}__{}.json",
            file_stem(&m.algorithm),
            file_stem(&m.statistic)
        );
        if !used.insert(file.clone()) {
            return Err(Error::InvalidInput(format!(
                "algorithm names {:?} collide as model file {file}",
                m.algorithm
            )));
        }
        let path = dir.join(&file);
        fs::write(&path, m.model.to_json()?).map_err(|e| Error::io(&path, e))?;
        entries.push(ManifestEntry {
            algorithm: m.algorithm.clone(),
            statistic: m.statistic.clone(),
            file,
        });
    }
    let manifest = ModelManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        fingerprint_config: report.fingerprint_config.canonical(),
        fingerprint_config_hash: report.fingerprint_config.hash(),
        split_seed: report.split.seed,
        model_seed: report.config.model_seed,
        feature_names: report.feature_names.clone(),
        statistics: report.config.statistics.iter().map(|s| s.tag()).collect(),
        models: entries,
    };
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// `Ok(None)` for an empty or missing directory.
pub fn read_manifest(dir: &Path) -> Result<Option<ModelManifest>> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        let empty = match fs::read_dir(dir) {
            Ok(mut it) => it.next().is_none(),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => true,
            Err(e) => return Err(Error::io(dir, e)),
        };
        if empty {
            return Ok(None);
        }
        return Err(Error::SchemaMismatch(format!(
            "{} has files but no {MANIFEST_FILE}",
            dir.display()
        )));
    }
    let doc = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: ModelManifest = serde_json::from_str(&doc)?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::SchemaMismatch(format!(
            "manifest schema version {} is not supported (expected {MANIFEST_SCHEMA_VERSION})",
            manifest.schema_version
        )));
    }
    Ok(Some(manifest))
}

/// Refuses fingerprints produced under a different configuration or with a
/// different column set than the models were trained on.
pub fn check_compatibility(manifest: &ModelManifest, table: &FingerprintTable) -> Result<()> {
    let hash = table.config.hash();
    if hash != manifest.fingerprint_config_hash {
        return Err(Error::SchemaMismatch(format!(
            "fingerprint config drift: models were trained on {} (hash {}), fingerprints use {} (hash {hash})",
            manifest.fingerprint_config,
            manifest.fingerprint_config_hash,
            table.config.canonical()
        )));
    }
    if table.feature_names != manifest.feature_names {
        return Err(Error::SchemaMismatch(format!(
            "fingerprint columns differ from the model schema: {}",
            describe_column_diff(&manifest.feature_names, &table.feature_names)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub dataset: String,
    /// 1-based within the dataset.
    pub rank: usize,
    pub algorithm: String,
    /// Raw predictions by statistic tag; `None` where no model exists.
    pub predicted: Vec<Option<f64>>,
    /// Display view: mean and percentiles clamped to [0, 1], std to [0, ∞).
    pub clipped: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionTable {
    pub statistics: Vec<String>,
    pub rows: Vec<PredictionRow>,
    pub warnings: Vec<String>,
    /// Set when no models were available.
    pub notice: Option<String>,
}

fn stat_from_tag(tag: &str) -> Option<TargetStatistic> {
    tag.parse().ok()
}

/// Predicts every modelled statistic of every algorithm for each fingerprint
/// row. Within a dataset, algorithms are ranked by clipped predicted mean,
/// highest first, ties and missing means ordered by name.
pub fn predict_unseen(model_dir: &Path, table: &FingerprintTable) -> Result<PredictionTable> {
    let Some(manifest) = read_manifest(model_dir)? else {
        return Ok(PredictionTable {
            statistics: Vec::new(),
            rows: Vec::new(),
            warnings: Vec::new(),
            notice: Some(format!("no models found in {}", model_dir.display())),
        });
    };
    check_compatibility(&manifest, table)?;

    let mut warnings = Vec::new();
    let mut models: BTreeMap<&str, BTreeMap<&str, TrainedRegressor>> = BTreeMap::new();
    for entry in &manifest.models {
        let path = model_dir.join(&entry.file);
        let loaded = fs::read_to_string(&path)
            .map_err(|e| Error::io(&path, e))
            .and_then(|doc| TrainedRegressor::from_json(&doc));
        match loaded {
            Ok(m) if m.n_features() == manifest.feature_names.len() => {
                models
                    .entry(entry.algorithm.as_str())
                    .or_default()
                    .insert(entry.statistic.as_str(), m);
            }
            Ok(m) => warnings.push(format!(
                "{} ({}): model expects {} features, manifest lists {}; omitted",
                entry.algorithm,
                entry.statistic,
                m.n_features(),
                manifest.feature_names.len()
            )),
            Err(e) => warnings.push(format!(
                "{} ({}): {e}; omitted",
                entry.algorithm, entry.statistic
            )),
        }
    }
    let listed: BTreeSet<&str> = manifest
        .models
        .iter()
        .map(|e| e.algorithm.as_str())
        .collect();
    for alg in listed.iter().filter(|a| !models.contains_key(*a)) {
        warnings.push(format!("no usable model for algorithm {alg}; omitted"));
    }
    for w in &warnings {
        log::warn!("{w}");
    }

    let notice = models
        .is_empty()
        .then(|| format!("no models found in {}", model_dir.display()));
    let stats = manifest.statistics.clone();
    let mean_pos = stats.iter().position(|s| s == "mean");
    let mut rows = Vec::new();
    for fp in &table.rows {
        let mut per_dataset: Vec<PredictionRow> = Vec::new();
        for (alg, by_stat) in &models {
            let mut predicted = Vec::with_capacity(stats.len());
            let mut clipped = Vec::with_capacity(stats.len());
            for tag in &stats {
                let raw = match by_stat.get(tag.as_str()) {
                    Some(m) => Some(m.predict_row(&fp.values)?),
                    None => None,
                };
                let view = match (raw, stat_from_tag(tag)) {
                    (Some(v), Some(s)) => Some(s.clip(v)),
                    (v, _) => v,
                };
                predicted.push(raw);
                clipped.push(view);
            }
            per_dataset.push(PredictionRow {
                dataset: fp.dataset.clone(),
                rank: 0,
                algorithm: alg.to_string(),
                predicted,
                clipped,
            });
        }
        per_dataset.sort_by(|a, b| {
            let key = |r: &PredictionRow| mean_pos.and_then(|i| r.clipped[i]);
            match (key(a), key(b)) {
                (Some(x), Some(y)) => y.total_cmp(&x),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then_with(|| a.algorithm.cmp(&b.algorithm))
        });
        for (i, r) in per_dataset.iter_mut().enumerate() {
            r.rank = i + 1;
        }
        rows.extend(per_dataset);
    }
    Ok(PredictionTable {
        statistics: stats,
        rows,
        warnings,
        notice,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl PredictionTable {
    /// `dataset,rank,algorithm,<stat>...,<stat>_clipped...`
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["dataset".to_string(), "rank".into(), "algorithm".into()];
        header.extend(self.statistics.iter().cloned());
        header.extend(self.statistics.iter().map(|s| format!("{s}_clipped")));
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.dataset.clone(), r.rank.to_string(), r.algorithm.clone()];
            rec.extend(r.predicted.iter().map(|v| opt(*v)));
            rec.extend(r.clipped.iter().map(|v| opt(*v)));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Aligned plain-text rendering, one block per dataset.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.notice {
            out.push_str(n);
            out.push('\n');
        }
        let mut current: Option<&str> = None;
        let width = self
            .rows
            .iter()
            .map(|r| r.algorithm.len())
            .max()
            .unwrap_or(0)
            .max("algorithm".len());
        for r in &self.rows {
            if current != Some(r.dataset.as_str()) {
                current = Some(&r.dataset);
                out.push_str(&format!("\n{}\n", r.dataset));
                out.push_str(&format!("{:>4}  {:<width$}", "rank", "algorithm"));
                for s in &self.statistics {
                    out.push_str(&format!("  {s:>10}"));
                }
                out.push('\n');
            }
            out.push_str(&format!("{:>4}  {:<width$}", r.rank, r.algorithm));
            for v in &r.clipped {
                match v {
                    Some(x) => out.push_str(&format!("  {x:>10.4}")),
                    None => out.push_str(&format!("  {:>10}", "-")),
                }
            }
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}
