use serde::{Deserialize, Serialize};

use crate::stats;

/// Per-column affine scaling learned on training rows. Columns that are
/// constant on the training rows map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let p = rows.first().map_or(0, Vec::len);
        let mut mean = Vec::with_capacity(p);
        let mut std = Vec::with_capacity(p);
        let mut column = Vec::with_capacity(rows.len());
        for j in 0..p {
            column.clear();
            column.extend(rows.iter().map(|r| r[j]));
            mean.push(stats::mean(&column));
            std.push(stats::population_std(&column));
        }
        Self { mean, std }
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

pub fn fit_standardizer(train_rows: &[Vec<f64>]) -> Standardizer {
    Standardizer::fit(train_rows)
}

pub fn apply_standardizer(standardizer: &Standardizer, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    standardizer.transform(rows)
}
