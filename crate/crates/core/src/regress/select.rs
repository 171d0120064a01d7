use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{RegressorKind, RegressorSpec, TrainedRegressor};
use crate::error::{Error, Result};
use crate::evalreport::mae;

/// Default candidate grid, in selection tie-break order.
pub fn default_candidates() -> Vec<RegressorSpec> {
    let mut out = Vec::new();
    for lambda in [0.01, 0.1, 1.0, 10.0] {
        out.push(RegressorSpec::Ridge { lambda });
    }
    for k in [1, 3, 5] {
        out.push(RegressorSpec::Knn { k });
    }
    for min_leaf in [1, 3] {
        out.push(RegressorSpec::RandomForest {
            n_trees: 200,
            max_depth: None,
            min_leaf,
            bootstrap: true,
        });
    }
    out.push(RegressorSpec::GradientBoosting {
        n_trees: 200,
        learning_rate: 0.1,
        max_depth: 3,
    });
    out.push(RegressorSpec::Adaboost {
        n_estimators: 50,
        max_depth: 3,
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub label: String,
    pub kind: RegressorKind,
    pub validation_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Index into the candidate slice.
    pub chosen_index: usize,
    pub chosen_kind: RegressorKind,
    pub chosen_label: String,
    pub validation_mae: f64,
    pub candidates: Vec<CandidateScore>,
    /// Best validation MAE per family.
    pub kind_maes: BTreeMap<RegressorKind, f64>,
}

/// Picks the candidate with the lowest validation MAE. Exact ties go to the
/// earlier family in [`RegressorKind`] order, then to the earlier candidate.
pub fn select_regressor(
    candidates: &[TrainedRegressor],
    x_val: &[Vec<f64>],
    y_val: &[f64],
) -> Result<SelectionResult> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no regressor candidates".into()));
    }
    if x_val.is_empty() || y_val.is_empty() {
        return Err(Error::InvalidInput("empty validation set".into()));
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for c in candidates {
        let preds = c.predict(x_val)?;
        scores.push(CandidateScore {
            label: c.spec.label(),
            kind: c.kind(),
            validation_mae: mae(&preds, y_val)?,
        });
    }
    let chosen = (0..scores.len())
        .min_by(|&a, &b| {
            scores[a]
                .validation_mae
                .total_cmp(&scores[b].validation_mae)
                .then(scores[a].kind.rank().cmp(&scores[b].kind.rank()))
                .then(a.cmp(&b))
        })
        .expect("non-empty");
    let mut kind_maes = BTreeMap::new();
    for s in &scores {
        kind_maes
            .entry(s.kind)
            .and_modify(|m: &mut f64| *m = m.min(s.validation_mae))
            .or_insert(s.validation_mae);
    }
    Ok(SelectionResult {
        chosen_index: chosen,
        chosen_kind: scores[chosen].kind,
        chosen_label: scores[chosen].label.clone(),
        validation_mae: scores[chosen].validation_mae,
        candidates: scores,
        kind_maes,
    })
}
