//! Regressor families mapping fingerprints to performance statistics.
//!
//! All families share one contract: fit on training rows and targets, then
//! [`TrainedRegressor::predict`] on any rows with the same column count.
//! Inputs are standardized with statistics of the training rows; the fitted
//! [`Standardizer`] travels with the model.

mod ensemble;
mod linalg;
mod select;
mod standardize;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

pub use ensemble::weighted_median;
pub use linalg::ridge_solve;
pub use select::{default_candidates, select_regressor, CandidateScore, SelectionResult};
pub use standardize::{apply_standardizer, fit_standardizer, Standardizer};
pub use tree::{build_tree, Tree, TreeParams, LEAF};

/// Current model file layout.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressorKind {
    Ridge,
    Knn,
    RandomForest,
    GradientBoosting,
    Adaboost,
    /// Predicts the training-target mean everywhere.
    ConstantMean,
}

impl RegressorKind {
    /// Position in the selection tie-break order.
    pub fn rank(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RegressorKind::Ridge => "ridge",
            RegressorKind::Knn => "knn",
            RegressorKind::RandomForest => "random_forest",
            RegressorKind::GradientBoosting => "gradient_boosting",
            RegressorKind::Adaboost => "adaboost",
            RegressorKind::ConstantMean => "constant_mean",
        }
    }

    /// Two-letter label used in report tables.
    pub fn abbreviation(self) -> &'static str {
        match self {
            RegressorKind::Ridge => "Ri",
            RegressorKind::Knn => "KN",
            RegressorKind::RandomForest => "RF",
            RegressorKind::GradientBoosting => "GB",
            RegressorKind::Adaboost => "AB",
            RegressorKind::ConstantMean => "CM",
        }
    }
}

impl fmt::Display for RegressorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegressorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "ridge" | "ri" => Self::Ridge,
            "knn" | "kn" => Self::Knn,
            "random_forest" | "rf" => Self::RandomForest,
            "gradient_boosting" | "gb" => Self::GradientBoosting,
            "adaboost" | "ab" => Self::Adaboost,
            "constant_mean" | "cm" => Self::ConstantMean,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown regressor kind {other:?}"
                )))
            }
        })
    }
}

/// A regressor family together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "hyperparameters", rename_all = "snake_case")]
pub enum RegressorSpec {
    Ridge {
        lambda: f64,
    },
    Knn {
        k: usize,
    },
    RandomForest {
        n_trees: usize,
        max_depth: Option<usize>,
        min_leaf: usize,
        bootstrap: bool,
    },
    GradientBoosting {
        n_trees: usize,
        learning_rate: f64,
        max_depth: usize,
    },
    Adaboost {
        n_estimators: usize,
        max_depth: usize,
    },
    ConstantMean,
}

impl RegressorSpec {
    pub fn kind(&self) -> RegressorKind {
        match self {
            RegressorSpec::Ridge { .. } => RegressorKind::Ridge,
            RegressorSpec::Knn { .. } => RegressorKind::Knn,
            RegressorSpec::RandomForest { .. } => RegressorKind::RandomForest,
            RegressorSpec::GradientBoosting { .. } => RegressorKind::GradientBoosting,
            RegressorSpec::Adaboost { .. } => RegressorKind::Adaboost,
            RegressorSpec::ConstantMean => RegressorKind::ConstantMean,
        }
    }

    /// Label like `ridge(lambda=0.1)`.
    pub fn label(&self) -> String {
        match self {
            RegressorSpec::Ridge { lambda } => format!("ridge(lambda={lambda})"),
            RegressorSpec::Knn { k } => format!("knn(k={k})"),
            RegressorSpec::RandomForest {
                n_trees,
                max_depth,
                min_leaf,
                bootstrap,
            } => format!(
                "random_forest(n_trees={n_trees},max_depth={},min_leaf={min_leaf},bootstrap={bootstrap})",
                max_depth.map_or("none".to_string(), |d| d.to_string())
            ),
            RegressorSpec::GradientBoosting {
                n_trees,
                learning_rate,
                max_depth,
            } => format!(
                "gradient_boosting(n_trees={n_trees},learning_rate={learning_rate},max_depth={max_depth})"
            ),
            RegressorSpec::Adaboost {
                n_estimators,
                max_depth,
            } => format!("adaboost(n_estimators={n_estimators},max_depth={max_depth})"),
            RegressorSpec::ConstantMean => "constant_mean".into(),
        }
    }
}

/// Fitted parameters, by family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelState {
    Constant {
        value: f64,
    },
    Linear {
        weights: Vec<f64>,
        intercept: f64,
    },
    Neighbors {
        rows: Vec<Vec<f64>>,
        targets: Vec<f64>,
        k: usize,
    },
    /// Prediction = weighted mean of tree outputs.
    Forest {
        trees: Vec<Tree>,
        tree_weight: Vec<f64>,
    },
    /// Prediction = `init + sum(tree_weight[m] * tree_m(x))`.
    Boosted {
        init: f64,
        trees: Vec<Tree>,
        tree_weight: Vec<f64>,
    },
    /// Prediction = weighted median of tree outputs.
    WeightedMedian {
        trees: Vec<Tree>,
        tree_weight: Vec<f64>,
    },
}

/// A fitted, immutable regressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedRegressor {
    pub version: u32,
    #[serde(flatten)]
    pub spec: RegressorSpec,
    pub seed: u64,
    pub standardizer: Standardizer,
    pub state: ModelState,
}

fn check_training(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::InvalidInput("no training rows".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} training rows but {} targets",
            x.len(),
            y.len()
        )));
    }
    let p = x[0].len();
    if let Some(r) = x.iter().position(|r| r.len() != p) {
        return Err(Error::ColumnMismatch {
            expected: p,
            actual: x[r].len(),
        });
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite training value".into()));
    }
    Ok(p)
}

fn finish(
    spec: RegressorSpec,
    seed: u64,
    standardizer: Standardizer,
    state: ModelState,
) -> TrainedRegressor {
    TrainedRegressor {
        version: MODEL_VERSION,
        spec,
        seed,
        standardizer,
        state,
    }
}

/// Ridge with an unpenalised intercept, fit on standardized features and
/// centered targets.
pub fn train_ridge(x: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<TrainedRegressor> {
    check_training(x, y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "ridge lambda must be >= 0, got {lambda}"
        )));
    }
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let intercept = stats::mean(y);
    let centered: Vec<f64> = y.iter().map(|v| v - intercept).collect();
    let weights = ridge_solve(&z, &centered, lambda);
    Ok(finish(
        RegressorSpec::Ridge { lambda },
        0,
        standardizer,
        ModelState::Linear { weights, intercept },
    ))
}

/// Unweighted k-nearest-neighbour mean in standardized space.
pub fn train_knn(x: &[Vec<f64>], y: &[f64], k: usize) -> Result<TrainedRegressor> {
    check_training(x, y)?;
    if k == 0 || k > x.len() {
        return Err(Error::InvalidInput(format!(
            "k must lie in 1..={}, got {k}",
            x.len()
        )));
    }
    let standardizer = Standardizer::fit(x);
    let rows = standardizer.transform(x);
    Ok(finish(
        RegressorSpec::Knn { k },
        0,
        standardizer,
        ModelState::Neighbors {
            rows,
            targets: y.to_vec(),
            k,
        },
    ))
}

/// CART forest. Each node searches `ceil(p / 3)` random features, except a
/// single tree without bootstrap, which searches all of them.
pub fn train_random_forest(
    x: &[Vec<f64>],
    y: &[f64],
    n_trees: usize,
    max_depth: Option<usize>,
    min_leaf: usize,
    bootstrap: bool,
    seed: u64,
) -> Result<TrainedRegressor> {
    let p = check_training(x, y)?;
    if n_trees == 0 {
        return Err(Error::InvalidInput(
            "random forest needs at least one tree".into(),
        ));
    }
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let max_features = if !bootstrap && n_trees == 1 {
        None
    } else {
        Some(p.div_ceil(3).max(1))
    };
    let params = TreeParams {
        max_depth,
        min_samples_leaf: min_leaf.max(1),
        max_features,
    };
    let trees = ensemble::grow_forest(&z, y, n_trees, params, bootstrap, seed);
    Ok(finish(
        RegressorSpec::RandomForest {
            n_trees,
            max_depth,
            min_leaf,
            bootstrap,
        },
        seed,
        standardizer,
        ModelState::Forest {
            tree_weight: vec![1.0; trees.len()],
            trees,
        },
    ))
}

pub fn train_gradient_boosting(
    x: &[Vec<f64>],
    y: &[f64],
    n_trees: usize,
    learning_rate: f64,
    max_depth: usize,
    seed: u64,
) -> Result<TrainedRegressor> {
    check_training(x, y)?;
    if !(learning_rate > 0.0 && learning_rate <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "learning rate must lie in (0, 1], got {learning_rate}"
        )));
    }
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let params = TreeParams {
        max_depth: Some(max_depth),
        min_samples_leaf: 1,
        max_features: None,
    };
    let (init, trees) = ensemble::gradient_boost(&z, y, n_trees, learning_rate, params, seed);
    Ok(finish(
        RegressorSpec::GradientBoosting {
            n_trees,
            learning_rate,
            max_depth,
        },
        seed,
        standardizer,
        ModelState::Boosted {
            init,
            tree_weight: vec![learning_rate; trees.len()],
            trees,
        },
    ))
}

/// AdaBoost.R2 (linear loss) over depth-limited CART trees.
pub fn train_adaboost(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    max_depth: usize,
    seed: u64,
) -> Result<TrainedRegressor> {
    check_training(x, y)?;
    if n_estimators == 0 {
        return Err(Error::InvalidInput(
            "adaboost needs at least one estimator".into(),
        ));
    }
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let params = TreeParams {
        max_depth: Some(max_depth),
        min_samples_leaf: 1,
        max_features: None,
    };
    let (trees, tree_weight) = ensemble::adaboost_r2(&z, y, n_estimators, params, seed);
    Ok(finish(
        RegressorSpec::Adaboost {
            n_estimators,
            max_depth,
        },
        seed,
        standardizer,
        ModelState::WeightedMedian { trees, tree_weight },
    ))
}

pub fn train_constant_mean(x: &[Vec<f64>], y: &[f64]) -> Result<TrainedRegressor> {
    check_training(x, y)?;
    Ok(finish(
        RegressorSpec::ConstantMean,
        0,
        Standardizer::fit(x),
        ModelState::Constant {
            value: stats::mean(y),
        },
    ))
}

/// Fits any family from its spec.
pub fn train(
    spec: &RegressorSpec,
    x: &[Vec<f64>],
    y: &[f64],
    seed: u64,
) -> Result<TrainedRegressor> {
    match *spec {
        RegressorSpec::Ridge { lambda } => train_ridge(x, y, lambda),
        RegressorSpec::Knn { k } => train_knn(x, y, k),
        RegressorSpec::RandomForest {
            n_trees,
            max_depth,
            min_leaf,
            bootstrap,
        } => train_random_forest(x, y, n_trees, max_depth, min_leaf, bootstrap, seed),
        RegressorSpec::GradientBoosting {
            n_trees,
            learning_rate,
            max_depth,
        } => train_gradient_boosting(x, y, n_trees, learning_rate, max_depth, seed),
        RegressorSpec::Adaboost {
            n_estimators,
            max_depth,
        } => train_adaboost(x, y, n_estimators, max_depth, seed),
        RegressorSpec::ConstantMean => train_constant_mean(x, y),
    }
}

impl TrainedRegressor {
    pub fn kind(&self) -> RegressorKind {
        self.spec.kind()
    }

    pub fn n_features(&self) -> usize {
        self.standardizer.n_features()
    }

    /// Raw (unclipped) predictions.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let p = self.n_features();
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::ColumnMismatch {
                expected: p,
                actual: bad.len(),
            });
        }
        Ok(rows
            .iter()
            .map(|r| self.predict_standardized(&self.standardizer.transform_row(r)))
            .collect())
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        Ok(self.predict(&[row.to_vec()])?[0])
    }

    fn predict_standardized(&self, z: &[f64]) -> f64 {
        match &self.state {
            ModelState::Constant { value } => *value,
            ModelState::Linear { weights, intercept } => {
                intercept + weights.iter().zip(z).map(|(w, x)| w * x).sum::<f64>()
            }
            ModelState::Neighbors { rows, targets, k } => {
                let mut dist: Vec<(f64, usize)> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (squared_distance(r, z), i))
                    .collect();
                dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let nearest: Vec<f64> = dist[..*k].iter().map(|(_, i)| targets[*i]).collect();
                stats::mean(&nearest)
            }
            ModelState::Forest { trees, tree_weight } => {
                let num: f64 = trees
                    .iter()
                    .zip(tree_weight)
                    .map(|(t, w)| w * t.predict_row(z))
                    .sum();
                num / tree_weight.iter().sum::<f64>()
            }
            ModelState::Boosted {
                init,
                trees,
                tree_weight,
            } => {
                let mut f = *init;
                for (t, w) in trees.iter().zip(tree_weight) {
                    f += w * t.predict_row(z);
                }
                f
            }
            ModelState::WeightedMedian { trees, tree_weight } => {
                let preds: Vec<f64> = trees.iter().map(|t| t.predict_row(z)).collect();
                weighted_median(&preds, tree_weight)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(doc: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(doc)?;
        if model.version != MODEL_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                model.version
            )));
        }
        let p = model.n_features();
        let trees_ok = match &model.state {
            ModelState::Forest { trees, tree_weight }
            | ModelState::Boosted {
                trees, tree_weight, ..
            }
            | ModelState::WeightedMedian { trees, tree_weight } => {
                trees.len() == tree_weight.len() && trees.iter().all(|t| t.is_valid(p))
            }
            ModelState::Linear { weights, .. } => weights.len() == p,
            ModelState::Neighbors { rows, targets, k } => {
                rows.len() == targets.len() && *k >= 1 && *k <= rows.len()
            }
            ModelState::Constant { .. } => true,
        };
        if !trees_ok || model.standardizer.std.len() != p {
            return Err(Error::InvalidInput("model state is inconsistent".into()));
        }
        Ok(model)
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
