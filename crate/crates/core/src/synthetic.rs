//! Synthetic corpora with a known fingerprint-to-accuracy relationship, for
//! end-to-end checks and demos.
//!
//! Each dataset has 2 to 5 classes of AR(1) series. Classes differ in level
//! and in autocorrelation by dataset-specific amounts, and series length
//! varies per dataset. An algorithm's mean accuracy on a dataset is a fixed
//! logistic function of three fingerprint coordinates (`range.mean`,
//! `meta.series_length`, `range.autocorr_lag1`) plus Gaussian noise; its
//! fold accuracies scatter around that mean.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataio::{FoldAccuracyTable, TimeSeriesDataset, TimeSeriesInstance};
use crate::error::{Error, Result};
use crate::fingerprint::{dataset_fingerprint, FingerprintConfig};

/// Fingerprint columns that drive the synthetic accuracies.
pub const DRIVING_FEATURES: [&str; 3] = ["range.mean", "meta.series_length", "range.autocorr_lag1"];

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub n_datasets: usize,
    pub n_algorithms: usize,
    pub n_folds: usize,
    /// Standard deviation of the noise added to each dataset's mean accuracy.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_datasets: 60,
            n_algorithms: 5,
            n_folds: 10,
            noise_sd: 0.01,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub datasets: Vec<TimeSeriesDataset>,
    pub folds: FoldAccuracyTable,
    /// Noise-free mean accuracy per (algorithm, dataset), same keys as `folds`.
    pub true_means: FoldAccuracyTable,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Noise-free mean accuracy of algorithm `a` at driving coordinates `u`.
pub fn accuracy_surface(a: usize, u: [f64; 3]) -> f64 {
    let af = a as f64;
    let z = (1.5 + 0.4 * af) * (u[0] - 1.0)
        + (1.2 - 0.5 * af) * (u[1] / 100.0 - 0.7)
        + 2.0 * if a.is_multiple_of(2) { 1.0 } else { -1.0 } * (u[2] - 0.4);
    0.5 + 0.45 * sigmoid(2.0 * z)
}

fn ar1(rng: &mut ChaCha8Rng, len: usize, level: f64, phi: f64) -> Vec<f64> {
    let innovation = Normal::new(0.0, (1.0 - phi * phi).sqrt()).expect("valid sd");
    let mut z: f64 = rng.sample(rand_distr::StandardNormal);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(level + z);
        z = phi * z + innovation.sample(rng);
    }
    out
}

fn generate_dataset(rng: &mut ChaCha8Rng, name: String) -> Result<TimeSeriesDataset> {
    let n_classes = rng.random_range(2..=5usize);
    let separation = rng.random_range(0.0..2.0);
    let phi0 = rng.random_range(-0.3..0.1);
    let dphi = rng.random_range(0.0..0.8);
    let len = rng.random_range(20..=120usize);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for c in 0..n_classes {
        let frac = c as f64 / (n_classes - 1) as f64;
        let level = separation * frac;
        let phi = phi0 + dphi * frac;
        let label = format!("c{c}");
        for _ in 0..rng.random_range(3..=10usize) {
            train.push(TimeSeriesInstance::new(
                ar1(rng, len, level, phi),
                label.clone(),
            ));
        }
        for _ in 0..rng.random_range(3..=10usize) {
            test.push(TimeSeriesInstance::new(
                ar1(rng, len, level, phi),
                label.clone(),
            ));
        }
    }
    TimeSeriesDataset::new(name, train, test)
}

/// Deterministic corpus for a given config.
pub fn generate_corpus(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    if config.n_datasets == 0 || config.n_algorithms == 0 || config.n_folds == 0 {
        return Err(Error::InvalidConfig(
            "synthetic corpus needs at least one dataset, algorithm and fold".into(),
        ));
    }
    let noise = Normal::new(0.0, config.noise_sd)
        .map_err(|e| Error::InvalidConfig(format!("noise sd: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let fp_config = FingerprintConfig::default();
    let names = fp_config.feature_names();
    let idx: Vec<usize> = DRIVING_FEATURES
        .iter()
        .map(|f| {
            names
                .iter()
                .position(|n| n == f)
                .expect("default config feature")
        })
        .collect();

    let mut datasets = Vec::with_capacity(config.n_datasets);
    let mut folds = FoldAccuracyTable::default();
    let mut true_means = FoldAccuracyTable::default();
    for d in 0..config.n_datasets {
        let ds = generate_dataset(&mut rng, format!("Synth{d:03}"))?;
        let fp = dataset_fingerprint(&ds, &fp_config)?.feature_vector;
        let u = [fp[idx[0]], fp[idx[1]], fp[idx[2]]];
        for a in 0..config.n_algorithms {
            let alg = format!("Algo{a}");
            let truth = accuracy_surface(a, u);
            let mean = (truth + noise.sample(&mut rng)).clamp(0.0, 1.0);
            // fold spread grows on harder datasets
            let spread = 0.01 + 0.08 * (1.0 - truth);
            let fold_noise = Normal::new(0.0, spread).expect("positive sd");
            let values: Vec<f64> = (0..config.n_folds)
                .map(|_| (mean + fold_noise.sample(&mut rng)).clamp(0.0, 1.0))
                .collect();
            folds.entries.insert((alg.clone(), ds.name.clone()), values);
            true_means
                .entries
                .insert((alg, ds.name.clone()), vec![truth]);
        }
        datasets.push(ds);
    }
    Ok(SyntheticCorpus {
        datasets,
        folds,
        true_means,
    })
}

impl SyntheticCorpus {
    /// Writes `<name>_TRAIN.csv` / `<name>_TEST.csv` per dataset into
    /// `dataset_dir` and the long-form fold table to `results_file`.
    pub fn write_to(&self, dataset_dir: &Path, results_file: &Path) -> Result<()> {
        fs::create_dir_all(dataset_dir).map_err(|e| Error::io(dataset_dir, e))?;
        for ds in &self.datasets {
            let (train, test) = ds.to_csv();
            for (suffix, body) in [("TRAIN", train), ("TEST", test)] {
                let path = dataset_dir.join(format!("{}_{suffix}.csv", ds.name));
                fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            }
        }
        fs::write(results_file, self.folds.to_long_csv()?).map_err(|e| Error::io(results_file, e))
    }
}
