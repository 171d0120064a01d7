use std::fs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsfingerprint::dataio::FoldAccuracyTable;
use tsfingerprint::evalreport::{
    emit_report, predict_unseen, read_manifest, run_pipeline, write_model_dir, EvaluationReport,
    PipelineConfig, ReportFormat, MANIFEST_FILE,
};
use tsfingerprint::fingerprint::{
    fingerprint_corpus, DatasetAggregation, FingerprintConfig, FingerprintRow, FingerprintTable,
};
use tsfingerprint::regress::{RegressorKind, RegressorSpec};
use tsfingerprint::synthetic::{generate_corpus, SyntheticConfig};
use tsfingerprint::targets::{build_records, PerformanceRecord, TargetStatistic};
use tsfingerprint::Error;

fn corpus(
    n_datasets: usize,
    n_algorithms: usize,
    seed: u64,
) -> (FingerprintTable, Vec<PerformanceRecord>) {
    let c = generate_corpus(&SyntheticConfig {
        n_datasets,
        n_algorithms,
        seed,
        ..Default::default()
    })
    .unwrap();
    let config = FingerprintConfig::default();
    let table = FingerprintTable::from_corpus(&config, &fingerprint_corpus(&c.datasets, &config));
    (table, build_records(&c.folds).unwrap())
}

fn fast_config() -> PipelineConfig {
    PipelineConfig {
        candidates: vec![
            RegressorSpec::Ridge { lambda: 1.0 },
            RegressorSpec::Knn { k: 3 },
            RegressorSpec::RandomForest {
                n_trees: 10,
                max_depth: None,
                min_leaf: 1,
                bootstrap: true,
            },
        ],
        ..Default::default()
    }
}

#[test]
fn one_row_per_algorithm_and_statistic() {
    let (table, records) = corpus(20, 35, 1);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    let r = &out.report;
    assert_eq!(r.rows.len(), 70);
    assert_eq!(r.summary.len(), 2);
    assert_eq!(out.models.len(), 70);
    assert!(r.warnings.is_empty());
    assert_eq!(
        (
            r.split.train.len(),
            r.split.validation.len(),
            r.split.test.len()
        ),
        (4, 4, 12)
    );
    for row in &r.rows {
        assert!(row.per_dataset_wins <= row.n_test);
        assert_eq!(row.n_test, 12);
        let recomputed = 100.0 * (row.model_mae - row.baseline_mae) / row.baseline_mae;
        assert_eq!(row.relative_change_pct, recomputed);
    }
    for (stored, recomputed) in r.summary.iter().zip(r.recompute_summary()) {
        assert_eq!(stored.statistic, recomputed.statistic);
        assert!((stored.model_mae - recomputed.model_mae).abs() <= 1e-12);
        assert!((stored.baseline_mae - recomputed.baseline_mae).abs() <= 1e-12);
        assert!((stored.relative_change_pct - recomputed.relative_change_pct).abs() <= 1e-12);
        let rows: Vec<f64> = r
            .rows
            .iter()
            .filter(|x| x.statistic == stored.statistic)
            .map(|x| x.model_mae)
            .collect();
        let naive = rows.iter().sum::<f64>() / rows.len() as f64;
        assert!((stored.model_mae - naive).abs() <= 1e-12);
    }
}

#[test]
fn percentile_statistic_rows() {
    let (table, records) = corpus(15, 2, 2);
    let config = PipelineConfig {
        statistics: vec![TargetStatistic::Percentile(10.0)],
        ..fast_config()
    };
    let out = run_pipeline(&table, &records, &config).unwrap();
    assert_eq!(out.report.rows.len(), 2);
    for row in &out.report.rows {
        assert_eq!(row.statistic, "p10");
    }
    let train: Vec<&PerformanceRecord> = records
        .iter()
        .filter(|r| r.algorithm == "Algo0" && out.report.split.train.contains(&r.dataset))
        .collect();
    let p10: Vec<f64> = train
        .iter()
        .map(|r| r.statistic(TargetStatistic::Percentile(10.0)).unwrap())
        .collect();
    let expected = tsfingerprint::stats::mean(&p10);
    assert_eq!(out.report.rows[0].baseline_value, expected);
    let csv = emit_report(&out.report, ReportFormat::Csv);
    assert!(csv.starts_with("h,r(p10),baseline-MAE(p10),model-MAE(p10),Δ%(p10)\n"));
}

#[test]
fn under_covered_algorithm_is_skipped_with_warning() {
    let (table, mut records) = corpus(20, 2, 3);
    // an algorithm evaluated on a single dataset cannot cover all three parts
    let mut lonely = records[0].clone();
    lonely.algorithm = "Sparse".into();
    records.push(lonely);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    assert_eq!(out.report.rows.len(), 4);
    assert!(out.report.rows.iter().all(|r| r.algorithm != "Sparse"));
    let sparse: Vec<_> = out
        .report
        .warnings
        .iter()
        .filter(|w| w.algorithm.as_deref() == Some("Sparse"))
        .collect();
    assert_eq!(sparse.len(), 2);
    assert!(sparse[0].message.contains("insufficient coverage"));
}

#[test]
fn results_without_fingerprints_are_reported() {
    let (table, mut records) = corpus(12, 1, 4);
    let mut ghost = records[0].clone();
    ghost.dataset = "Ghost".into();
    records.push(ghost);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    assert!(out
        .report
        .warnings
        .iter()
        .any(|w| w.message.contains("\"Ghost\"")));
    assert!(!out.report.split.test.contains(&"Ghost".to_string()));
}

#[test]
fn pipeline_is_deterministic() {
    let (table, records) = corpus(20, 3, 5);
    let config = PipelineConfig {
        split_seed: 17,
        model_seed: 3,
        ..Default::default()
    };
    let a = run_pipeline(&table, &records, &config).unwrap();
    let b = run_pipeline(&table, &records, &config).unwrap();
    assert_eq!(a.report.to_json().unwrap(), b.report.to_json().unwrap());
    assert_eq!(
        emit_report(&a.report, ReportFormat::Csv),
        emit_report(&b.report, ReportFormat::Csv)
    );
    for (x, y) in a.models.iter().zip(&b.models) {
        assert_eq!(x.model.to_json().unwrap(), y.model.to_json().unwrap());
    }
}

#[test]
fn report_json_round_trip() {
    let (table, records) = corpus(12, 2, 6);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    let back = EvaluationReport::from_json(&out.report.to_json().unwrap()).unwrap();
    assert_eq!(back, out.report);
    assert_eq!(
        emit_report(&back, ReportFormat::Markdown),
        emit_report(&out.report, ReportFormat::Markdown)
    );
}

#[test]
fn single_algorithm_mean_row_matches() {
    let (table, records) = corpus(12, 1, 7);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    let csv = emit_report(&out.report, ReportFormat::Csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    let strip = |l: &str| -> Vec<String> {
        l.split(',')
            .skip(1)
            .enumerate()
            .filter(|(i, _)| i % 4 != 0)
            .map(|(_, c)| c.to_string())
            .collect()
    };
    assert_eq!(strip(lines[1]), strip(lines[2]));
}

#[test]
fn rejects_bad_config() {
    let (table, records) = corpus(10, 1, 8);
    let mut config = fast_config();
    config.statistics.clear();
    assert!(run_pipeline(&table, &records, &config).is_err());
    let mut config = fast_config();
    config.candidates.clear();
    assert!(run_pipeline(&table, &records, &config).is_err());
    let mut config = fast_config();
    config.ratios.train = 0.5;
    assert!(run_pipeline(&table, &records, &config).is_err());
}

#[test]
fn model_directory_and_unseen_prediction() {
    let (table, records) = corpus(20, 4, 9);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_model_dir(dir.path(), &out.report, &out.models).unwrap();
    assert_eq!(manifest.models.len(), 8);
    assert!(dir.path().join("Algo0__mean.json").exists());
    assert!(dir.path().join("Algo3__std.json").exists());
    assert_eq!(read_manifest(dir.path()).unwrap().unwrap(), manifest);
    let manifest_doc = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
    for key in ["schema_version", "fingerprint_config_hash", "split_seed"] {
        assert!(manifest_doc.contains(key));
    }

    let unseen = FingerprintTable {
        rows: table.rows[..2].to_vec(),
        ..table.clone()
    };
    let pred = predict_unseen(dir.path(), &unseen).unwrap();
    assert!(pred.notice.is_none());
    assert_eq!(pred.statistics, vec!["mean", "std"]);
    assert_eq!(pred.rows.len(), 8);
    for ds in [&unseen.rows[0].dataset, &unseen.rows[1].dataset] {
        let block: Vec<_> = pred.rows.iter().filter(|r| &r.dataset == ds).collect();
        assert_eq!(block.len(), 4);
        for (i, r) in block.iter().enumerate() {
            assert_eq!(r.rank, i + 1);
            assert!(r.predicted.iter().all(|v| v.unwrap().is_finite()));
            let m = r.clipped[0].unwrap();
            assert!((0.0..=1.0).contains(&m));
            assert!(r.clipped[1].unwrap() >= 0.0);
        }
        for w in block.windows(2) {
            assert!(w[0].clipped[0] >= w[1].clipped[0]);
        }
    }
    let csv = pred.to_csv();
    assert!(csv.starts_with("dataset,rank,algorithm,mean,std,mean_clipped,std_clipped\n"));
    assert!(pred.to_text().contains("rank"));

    // fed back through a stored model, predictions match in-memory ones
    let m0 = &out.models[0];
    let direct = m0.model.predict_row(&unseen.rows[0].values).unwrap();
    let served = pred
        .rows
        .iter()
        .find(|r| r.dataset == unseen.rows[0].dataset && r.algorithm == m0.algorithm)
        .unwrap();
    assert!((served.predicted[0].unwrap() - direct).abs() <= 1e-12);

    // missing model file -> omitted with a warning
    fs::remove_file(dir.path().join("Algo2__mean.json")).unwrap();
    fs::remove_file(dir.path().join("Algo2__std.json")).unwrap();
    let pred = predict_unseen(dir.path(), &unseen).unwrap();
    assert_eq!(pred.rows.len(), 6);
    assert!(pred.warnings.iter().any(|w| w.contains("Algo2")));
}

#[test]
fn ranking_order_and_ties() {
    // two algorithms with constant models predicting 0.87 and 0.91
    let mut fold_table = FoldAccuracyTable::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let names: Vec<String> = (0..10).map(|i| format!("D{i}")).collect();
    for d in &names {
        let spread = rng.random_range(0.0..0.01);
        let offset = rng.random_range(-0.005..0.005);
        // AlsoLow duplicates Low exactly, so their predictions tie
        for (alg, level) in [("Low", 0.87), ("High", 0.91), ("AlsoLow", 0.87)] {
            fold_table.entries.insert(
                (alg.into(), d.clone()),
                vec![level + offset - spread, level + offset + spread],
            );
        }
    }
    let records = build_records(&fold_table).unwrap();
    let config = FingerprintConfig::default();
    let mut table = FingerprintTable::new(config);
    for (i, d) in names.iter().enumerate() {
        table.rows.push(FingerprintRow {
            dataset: d.clone(),
            values: (0..44).map(|j| (i * j) as f64).collect(),
        });
    }
    let pipeline = PipelineConfig {
        candidates: vec![RegressorSpec::ConstantMean],
        ..Default::default()
    };
    let out = run_pipeline(&table, &records, &pipeline).unwrap();
    assert!(out
        .report
        .rows
        .iter()
        .all(|r| r.chosen_regressor_kind == RegressorKind::ConstantMean));
    let dir = tempfile::tempdir().unwrap();
    write_model_dir(dir.path(), &out.report, &out.models).unwrap();
    let query = FingerprintTable {
        rows: table.rows[..1].to_vec(),
        ..table.clone()
    };
    let pred = predict_unseen(dir.path(), &query).unwrap();
    let order: Vec<&str> = pred.rows.iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(order, ["High", "AlsoLow", "Low"]);
}

#[test]
fn empty_model_directory() {
    let dir = tempfile::tempdir().unwrap();
    let table = FingerprintTable::new(FingerprintConfig::default());
    let pred = predict_unseen(dir.path(), &table).unwrap();
    assert!(pred.rows.is_empty());
    assert!(pred.notice.unwrap().contains("no models"));
}

#[test]
fn schema_guard() {
    let (table, records) = corpus(12, 1, 10);
    let out = run_pipeline(&table, &records, &fast_config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_model_dir(dir.path(), &out.report, &out.models).unwrap();

    let other = FingerprintConfig {
        dataset_aggregations: vec![DatasetAggregation::Std],
        ..Default::default()
    };
    let drifted = FingerprintTable::new(other);
    match predict_unseen(dir.path(), &drifted) {
        Err(Error::SchemaMismatch(msg)) => assert!(msg.contains("drift"), "{msg}"),
        other => panic!("expected drift refusal, got {other:?}"),
    }

    let mut renamed = table.clone();
    renamed.feature_names[3] = "std.maximum".into();
    match predict_unseen(dir.path(), &renamed) {
        Err(Error::SchemaMismatch(msg)) => {
            assert!(
                msg.contains("std.maximum") && msg.contains("std.max"),
                "{msg}"
            )
        }
        other => panic!("expected column mismatch, got {other:?}"),
    }
}
