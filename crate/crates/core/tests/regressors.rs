use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsfingerprint::regress::{
    select_regressor, train, train_knn, train_ridge, RegressorSpec, TrainedRegressor,
};
use tsfingerprint::stats;

fn problem(seed: u64, n: usize, p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = x
        .iter()
        .map(|r| 0.5 + 0.2 * r[0] - 0.1 * r[p - 1] + rng.random_range(-0.02..0.02))
        .collect();
    (x, y)
}

#[test]
fn ridge_shrinks_to_mean() {
    for seed in 0..10 {
        let (x, y) = problem(seed, 15, 4);
        let m = train_ridge(&x, &y, 1e9).unwrap();
        let mean = stats::mean(&y);
        for p in m.predict(&x).unwrap() {
            assert!((p - mean).abs() <= 1e-6);
        }
    }
}

fn scaled(x: &[Vec<f64>], col: usize, c: f64) -> Vec<Vec<f64>> {
    x.iter()
        .map(|r| {
            let mut r = r.clone();
            r[col] *= c;
            r
        })
        .collect()
}

#[test]
fn column_scaling_is_absorbed() {
    let (x, y) = problem(1, 20, 3);
    let (q, _) = problem(2, 6, 3);
    for (col, c) in [(0, 1000.0), (1, 1e-3), (2, 7.0)] {
        let xs = scaled(&x, col, c);
        let qs = scaled(&q, col, c);
        let knn_a = train_knn(&x, &y, 3).unwrap().predict(&q).unwrap();
        let knn_b = train_knn(&xs, &y, 3).unwrap().predict(&qs).unwrap();
        for (a, b) in knn_a.iter().zip(&knn_b) {
            assert!((a - b).abs() <= 1e-12);
        }
        let r_a = train_ridge(&x, &y, 0.1).unwrap().predict(&q).unwrap();
        let r_b = train_ridge(&xs, &y, 0.1).unwrap().predict(&qs).unwrap();
        for (a, b) in r_a.iter().zip(&r_b) {
            assert!((a - b).abs() <= 1e-10);
        }
    }
}

#[test]
fn selection_kind_survives_scaling() {
    let (x, y) = problem(3, 24, 3);
    let (xv, yv) = problem(4, 10, 3);
    let specs = [
        RegressorSpec::Ridge { lambda: 0.1 },
        RegressorSpec::Knn { k: 3 },
    ];
    let pick = |x: &[Vec<f64>], xv: &[Vec<f64>]| {
        let models: Vec<TrainedRegressor> =
            specs.iter().map(|s| train(s, x, &y, 0).unwrap()).collect();
        select_regressor(&models, xv, &yv).unwrap().chosen_kind
    };
    let base = pick(&x, &xv);
    assert_eq!(base, pick(&scaled(&x, 0, 50.0), &scaled(&xv, 0, 50.0)));
    assert_eq!(base, pick(&scaled(&x, 2, 0.01), &scaled(&xv, 2, 0.01)));
}

#[test]
fn forest_and_boosting_learn_signal() {
    let (x, y) = problem(5, 60, 2);
    let (q, truth) = problem(6, 30, 2);
    let mean = stats::mean(&y);
    let base: f64 = truth.iter().map(|t| (t - mean).abs()).sum();
    for spec in [
        RegressorSpec::RandomForest {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            bootstrap: true,
        },
        RegressorSpec::GradientBoosting {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 3,
        },
        RegressorSpec::Adaboost {
            n_estimators: 50,
            max_depth: 3,
        },
    ] {
        let m = train(&spec, &x, &y, 1).unwrap();
        let err: f64 = m
            .predict(&q)
            .unwrap()
            .iter()
            .zip(&truth)
            .map(|(p, t)| (p - t).abs())
            .sum();
        assert!(err < 0.6 * base, "{}: {err} vs {base}", spec.label());
    }
}

#[test]
fn different_seeds_differ() {
    let (x, y) = problem(7, 30, 4);
    let spec = RegressorSpec::RandomForest {
        n_trees: 20,
        max_depth: None,
        min_leaf: 1,
        bootstrap: true,
    };
    let a = train(&spec, &x, &y, 1).unwrap();
    let b = train(&spec, &x, &y, 2).unwrap();
    assert_ne!(a.to_json().unwrap(), b.to_json().unwrap());
}
