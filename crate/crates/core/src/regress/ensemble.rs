//! Tree ensembles: random forest, least-squares gradient boosting and
//! AdaBoost.R2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{build_tree, Tree, TreeParams};
use crate::stats;

pub(crate) fn tree_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Grows `n_trees` trees, each on its own RNG stream so the forest can be
/// built in parallel and still be bit-reproducible.
pub(crate) fn grow_forest(
    x: &[Vec<f64>],
    y: &[f64],
    n_trees: usize,
    params: TreeParams,
    bootstrap: bool,
    seed: u64,
) -> Vec<Tree> {
    let n = x.len();
    (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(seed, t as u64);
            let sample: Vec<usize> = if bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            build_tree(x, y, &sample, params, &mut rng)
        })
        .collect()
}

/// Stagewise least-squares boosting. Returns the initial constant and the
/// stage trees; each stage is added with weight `learning_rate`.
pub(crate) fn gradient_boost(
    x: &[Vec<f64>],
    y: &[f64],
    n_trees: usize,
    learning_rate: f64,
    params: TreeParams,
    seed: u64,
) -> (f64, Vec<Tree>) {
    let init = stats::mean(y);
    let mut current = vec![init; y.len()];
    let mut trees = Vec::with_capacity(n_trees);
    let all: Vec<usize> = (0..y.len()).collect();
    let mut rng = tree_rng(seed, 0);
    for _ in 0..n_trees {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(t, f)| t - f).collect();
        let tree = build_tree(x, &residuals, &all, params, &mut rng);
        for (f, row) in current.iter_mut().zip(x) {
            *f += learning_rate * tree.predict_row(row);
        }
        trees.push(tree);
    }
    (init, trees)
}

/// AdaBoost.R2 with linear loss. Returns trees and their weights
/// `ln(1 / beta)`.
pub(crate) fn adaboost_r2(
    x: &[Vec<f64>],
    y: &[f64],
    n_estimators: usize,
    params: TreeParams,
    seed: u64,
) -> (Vec<Tree>, Vec<f64>) {
    let n = y.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut trees = Vec::new();
    let mut tree_weights = Vec::new();
    let mut rng = tree_rng(seed, 0);
    for round in 0..n_estimators {
        let sample = weighted_resample(&weights, &mut rng);
        let tree = build_tree(x, y, &sample, params, &mut rng);
        let mut loss: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(row, t)| (tree.predict_row(row) - t).abs())
            .collect();
        let max_loss = loss.iter().copied().fold(0.0, f64::max);
        if max_loss > 0.0 {
            loss.iter_mut().for_each(|l| *l /= max_loss);
        }
        let avg_loss: f64 = weights.iter().zip(&loss).map(|(w, l)| w * l).sum();

        if avg_loss <= 0.0 {
            // Perfect fit: this estimator alone decides.
            trees.push(tree);
            tree_weights.push(1.0);
            break;
        }
        if avg_loss >= 0.5 {
            if trees.is_empty() {
                trees.push(tree);
                tree_weights.push(1.0);
            }
            break;
        }
        let beta = avg_loss / (1.0 - avg_loss);
        trees.push(tree);
        tree_weights.push((1.0 / beta).ln());

        if round + 1 < n_estimators {
            for (w, l) in weights.iter_mut().zip(&loss) {
                *w *= beta.powf(1.0 - l);
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
        }
    }
    (trees, tree_weights)
}

/// Draws `weights.len()` row indices with probability proportional to
/// `weights`.
fn weighted_resample(weights: &[f64], rng: &mut impl Rng) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    (0..weights.len())
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            cumulative
                .partition_point(|c| *c <= u)
                .min(weights.len() - 1)
        })
        .collect()
}

/// Smallest value whose cumulative weight (values sorted ascending, ties in
/// input order) reaches half of the total weight.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    order.last().map_or(0.0, |&i| values[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_median_picks_dominant() {
        assert_eq!(weighted_median(&[0.2, 0.8], &[1.0, 10.0]), 0.8);
        assert_eq!(weighted_median(&[0.2, 0.8], &[10.0, 1.0]), 0.2);
        assert_eq!(weighted_median(&[0.5], &[0.3]), 0.5);
        assert_eq!(weighted_median(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]), 2.0);
    }

    #[test]
    fn resample_follows_weights() {
        let mut rng = tree_rng(1, 0);
        let s = weighted_resample(&[0.0, 1.0, 0.0], &mut rng);
        assert!(s.iter().all(|&i| i == 1));
    }
}
