use crate::error::{Error, Result};
use crate::stats;

/// Mean absolute error.
pub fn mae(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions but {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidInput("mae of an empty set".into()));
    }
    let errors: Vec<f64> = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p - t).abs())
        .collect();
    Ok(stats::mean(&errors))
}

/// `100 * (model - baseline) / baseline`; negative means the model is better.
pub fn relative_change(model_mae: f64, baseline_mae: f64) -> Result<f64> {
    if baseline_mae <= 0.0 || !baseline_mae.is_finite() {
        return Err(Error::InvalidInput(format!(
            "relative change needs a positive baseline error, got {baseline_mae}"
        )));
    }
    Ok(100.0 * (model_mae - baseline_mae) / baseline_mae)
}

/// Whether the model is strictly closer to the truth than the baseline.
pub fn per_dataset_win(pred: f64, truth: f64, baseline_value: f64) -> bool {
    (pred - truth).abs() < (baseline_value - truth).abs()
}
