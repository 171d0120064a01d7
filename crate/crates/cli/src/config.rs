//! Versioned TOML run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tsfingerprint::dataio::SplitRatios;
use tsfingerprint::evalreport::ReportFormat;
use tsfingerprint::fingerprint::{ClassAggregation, DatasetAggregation, FingerprintConfig};
use tsfingerprint::targets::TargetStatistic;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "TSFP_OUTPUT_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub paths: PathsSection,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub fingerprint: FingerprintSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub datasets: Option<PathBuf>,
    pub fingerprints: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub model_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub seed: Option<u64>,
    pub ratios: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintSection {
    pub class_aggregation: Option<String>,
    pub dataset_aggregations: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    pub statistics: Option<Vec<String>>,
    pub model_seed: Option<u64>,
    pub report_format: Option<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub datasets: Option<PathBuf>,
    pub fingerprints: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub model_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub ratios: Option<String>,
    pub stats: Option<String>,
    pub model_seed: Option<u64>,
    pub class_aggregation: Option<String>,
    pub dataset_aggregations: Option<String>,
    pub format: Option<String>,
}

#[derive(Debug, Clone)]
pub enum Input {
    Datasets(PathBuf),
    Fingerprints(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Input,
    pub results: PathBuf,
    pub output_dir: PathBuf,
    pub model_dir: PathBuf,
    pub split_seed: u64,
    pub ratios: SplitRatios,
    pub fingerprint: FingerprintConfig,
    pub statistics: Vec<TargetStatistic>,
    pub model_seed: u64,
    pub format: ReportFormat,
}

pub fn load_config_file(path: &Path) -> anyhow::Result<ConfigFile> {
    let doc = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&doc).map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))
}

pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn parse_ratios(values: &[f64]) -> Result<SplitRatios, String> {
    match values {
        [a, b, c] => SplitRatios::new(*a, *b, *c).map_err(|e| e.to_string()),
        _ => Err(format!("expected 3 values, got {}", values.len())),
    }
}

pub fn parse_ratio_flag(s: &str) -> Result<SplitRatios, String> {
    let values = parse_list(s)
        .iter()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("{t:?} is not a number"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    parse_ratios(&values)
}

pub fn parse_statistics(items: &[String]) -> Result<Vec<TargetStatistic>, String> {
    if items.is_empty() {
        return Err("must list at least one statistic".into());
    }
    let mut out = Vec::new();
    for (i, s) in items.iter().enumerate() {
        let stat: TargetStatistic = s.parse().map_err(|e| format!("[{i}]: {e}"))?;
        if out.contains(&stat) {
            return Err(format!("[{i}]: {s} listed twice"));
        }
        out.push(stat);
    }
    Ok(out)
}

pub fn parse_fingerprint_config(
    class: Option<&str>,
    datasets: Option<&[String]>,
) -> Result<FingerprintConfig, Vec<(String, String)>> {
    let mut errors = Vec::new();
    let mut config = FingerprintConfig::default();
    if let Some(c) = class {
        match c.parse::<ClassAggregation>() {
            Ok(v) => config.class_aggregation = v,
            Err(e) => errors.push(("fingerprint.class_aggregation".into(), e.to_string())),
        }
    }
    if let Some(list) = datasets {
        let parsed: Result<Vec<DatasetAggregation>, _> = list.iter().map(|s| s.parse()).collect();
        match parsed {
            Ok(v) => config.dataset_aggregations = v,
            Err(e) => errors.push(("fingerprint.dataset_aggregations".into(), e.to_string())),
        }
    }
    if errors.is_empty() {
        if let Err(e) = config.validate() {
            errors.push(("fingerprint.dataset_aggregations".into(), e.to_string()));
        }
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

impl RunConfig {
    /// Merges file and flags (flags win) and validates every field, reporting
    /// all problems at once.
    pub fn resolve(file: ConfigFile, flags: Overrides) -> anyhow::Result<Self> {
        let mut errors: Vec<(String, String)> = Vec::new();
        match file.schema_version {
            None | Some(CONFIG_SCHEMA_VERSION) => {}
            Some(v) => errors.push((
                "schema_version".into(),
                format!("unsupported version {v} (expected {CONFIG_SCHEMA_VERSION})"),
            )),
        }

        let datasets = flags.datasets.or(file.paths.datasets);
        let fingerprints = flags.fingerprints.or(file.paths.fingerprints);
        let input = match (datasets, fingerprints) {
            (Some(d), None) => Some(Input::Datasets(d)),
            (None, Some(f)) => Some(Input::Fingerprints(f)),
            (Some(_), Some(_)) => {
                errors.push((
                    "paths.datasets".into(),
                    "give either datasets or fingerprints, not both".into(),
                ));
                None
            }
            (None, None) => {
                errors.push((
                    "paths.datasets".into(),
                    "one of datasets or fingerprints is required".into(),
                ));
                None
            }
        };
        let results = flags.results.or(file.paths.results);
        if results.is_none() {
            errors.push(("paths.results".into(), "required".into()));
        }
        let output_dir = flags
            .output_dir
            .or(file.paths.output_dir)
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("tsfp-out"));
        let model_dir = flags
            .model_dir
            .or(file.paths.model_dir)
            .unwrap_or_else(|| output_dir.join("models"));

        let ratios = match (flags.ratios, file.split.ratios) {
            (Some(s), _) => parse_ratio_flag(&s),
            (None, Some(v)) => parse_ratios(&v),
            (None, None) => Ok(SplitRatios::default()),
        }
        .unwrap_or_else(|e| {
            errors.push(("split.ratios".into(), e));
            SplitRatios::default()
        });

        let stat_items = flags
            .stats
            .map(|s| parse_list(&s))
            .or(file.evaluation.statistics)
            .unwrap_or_else(|| vec!["mean".into(), "std".into()]);
        let statistics = parse_statistics(&stat_items).unwrap_or_else(|e| {
            errors.push(("evaluation.statistics".into(), e));
            Vec::new()
        });

        let class = flags
            .class_aggregation
            .or(file.fingerprint.class_aggregation);
        let dataset_aggs = flags
            .dataset_aggregations
            .map(|s| parse_list(&s))
            .or(file.fingerprint.dataset_aggregations);
        let fingerprint = parse_fingerprint_config(class.as_deref(), dataset_aggs.as_deref())
            .unwrap_or_else(|e| {
                errors.extend(e);
                FingerprintConfig::default()
            });

        let format = flags
            .format
            .or(file.evaluation.report_format)
            .map(|f| f.parse::<ReportFormat>())
            .transpose()
            .unwrap_or_else(|e| {
                errors.push(("evaluation.report_format".into(), e.to_string()));
                None
            })
            .unwrap_or(ReportFormat::Markdown);

        if let (Some(r), Some(input)) = (&results, &input) {
            let inp = match input {
                Input::Datasets(p) | Input::Fingerprints(p) => p,
            };
            for (field, written) in [
                ("paths.output_dir", &output_dir),
                ("paths.model_dir", &model_dir),
            ] {
                if written == r || written == inp {
                    errors.push((
                        field.into(),
                        format!("{} is also an input", written.display()),
                    ));
                }
            }
        }

        if !errors.is_empty() {
            let mut msg = String::from("invalid configuration:");
            for (field, e) in &errors {
                let _ = write!(msg, "\n  {field}: {e}");
            }
            anyhow::bail!(msg);
        }
        Ok(Self {
            input: input.expect("checked"),
            results: results.expect("checked"),
            output_dir,
            model_dir,
            split_seed: flags.seed.or(file.split.seed).unwrap_or(0),
            ratios,
            fingerprint,
            statistics,
            model_seed: flags.model_seed.or(file.evaluation.model_seed).unwrap_or(0),
            format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(doc: &str) -> ConfigFile {
        toml::from_str(doc).unwrap()
    }

    #[test]
    fn flags_win_over_file() {
        let f = file(
            r#"
            schema_version = 1
            [paths]
            datasets = "data"
            results = "res.csv"
            output_dir = "out"
            [split]
            seed = 3
            ratios = [0.3, 0.2, 0.5]
            [evaluation]
            statistics = ["mean"]
            "#,
        );
        let flags = Overrides {
            seed: Some(9),
            stats: Some("mean,std,p10".into()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(f, flags).unwrap();
        assert_eq!(cfg.split_seed, 9);
        assert_eq!(cfg.ratios.train, 0.3);
        assert_eq!(cfg.statistics.len(), 3);
        assert_eq!(cfg.model_dir, PathBuf::from("out/models"));
    }

    #[test]
    fn reports_every_bad_field() {
        let f = file(
            r#"
            schema_version = 2
            [split]
            ratios = [0.5, 0.5]
            [evaluation]
            statistics = ["mean", "p200"]
            report_format = "pdf"
            [fingerprint]
            class_aggregation = "mode"
            "#,
        );
        let err = RunConfig::resolve(f, Overrides::default())
            .unwrap_err()
            .to_string();
        for field in [
            "schema_version",
            "paths.datasets",
            "paths.results",
            "split.ratios",
            "evaluation.statistics",
            "evaluation.report_format",
            "fingerprint.class_aggregation",
        ] {
            assert!(err.contains(field), "{field} missing from {err}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ConfigFile>("[split]\nsede = 1\n").unwrap_err();
        assert!(err.to_string().contains("sede"));
    }
}
