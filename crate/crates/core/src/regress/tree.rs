//! CART regression trees stored as flat parallel arrays.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::stats;

/// Marker in `feature_idx`, `left` and `right` for leaf nodes.
pub const LEAF: i64 = -1;

/// Binary regression tree in preorder. Node `i` is a leaf when
/// `feature_idx[i] == LEAF`; otherwise rows with
/// `x[feature_idx[i]] <= threshold[i]` go to `left[i]`, the rest to
/// `right[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature_idx: Vec<i64>,
    pub threshold: Vec<f64>,
    pub left: Vec<i64>,
    pub right: Vec<i64>,
    pub leaf_value: Vec<f64>,
}

impl Tree {
    pub fn n_nodes(&self) -> usize {
        self.feature_idx.len()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = 0usize;
        loop {
            let f = self.feature_idx[node];
            if f == LEAF {
                return self.leaf_value[node];
            }
            node = if row[f as usize] <= self.threshold[node] {
                self.left[node]
            } else {
                self.right[node]
            } as usize;
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, node: usize) -> usize {
            if t.feature_idx[node] == LEAF {
                0
            } else {
                1 + walk(t, t.left[node] as usize).max(walk(t, t.right[node] as usize))
            }
        }
        walk(self, 0)
    }

    /// Structural check: every internal node references a feature below
    /// `n_features` and child indices inside the node arrays.
    pub fn is_valid(&self, n_features: usize) -> bool {
        let n = self.n_nodes();
        n > 0
            && [
                self.threshold.len(),
                self.left.len(),
                self.right.len(),
                self.leaf_value.len(),
            ]
            .iter()
            .all(|len| *len == n)
            && (0..n).all(|i| {
                let f = self.feature_idx[i];
                f == LEAF
                    || ((f as usize) < n_features
                        && (1..n as i64).contains(&self.left[i])
                        && (1..n as i64).contains(&self.right[i])
                        && self.threshold[i].is_finite())
            })
            && self.leaf_value.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features drawn per node; `None` considers all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
        }
    }
}

/// Grows a tree on the rows listed in `sample` (repeats allowed, as produced
/// by bootstrap or weighted resampling).
///
/// Each split minimises the summed squared error of the two children. When
/// `max_features` is set, a random subset of that size is searched first;
/// if none of those features admits a valid split, the remaining features
/// are tried in the same random order. A node whose targets differ is split
/// whenever any valid split exists, even one with zero gain.
pub fn build_tree(
    x: &[Vec<f64>],
    y: &[f64],
    sample: &[usize],
    params: TreeParams,
    rng: &mut impl RngCore,
) -> Tree {
    let mut tree = Tree {
        feature_idx: Vec::new(),
        threshold: Vec::new(),
        left: Vec::new(),
        right: Vec::new(),
        leaf_value: Vec::new(),
    };
    let p = x.first().map_or(0, Vec::len);
    let mut builder = Builder {
        x,
        y,
        params,
        p,
        features: (0..p).collect(),
        order: Vec::with_capacity(sample.len()),
    };
    let mut idx = sample.to_vec();
    builder.grow(&mut tree, &mut idx, 0, rng);
    tree
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    params: TreeParams,
    p: usize,
    features: Vec<usize>,
    order: Vec<usize>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    fn push_node(tree: &mut Tree, value: f64) -> usize {
        tree.feature_idx.push(LEAF);
        tree.threshold.push(0.0);
        tree.left.push(LEAF);
        tree.right.push(LEAF);
        tree.leaf_value.push(value);
        tree.n_nodes() - 1
    }

    fn grow(
        &mut self,
        tree: &mut Tree,
        idx: &mut [usize],
        depth: usize,
        rng: &mut impl RngCore,
    ) -> usize {
        let targets: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        let node = Self::push_node(tree, stats::mean(&targets));
        let pure = targets.windows(2).all(|w| w[0] == w[1]);
        let depth_left = self.params.max_depth.is_none_or(|d| depth < d);
        if pure || !depth_left || idx.len() < 2 * self.params.min_samples_leaf.max(1) {
            return node;
        }
        let Some(split) = self.best_split(idx, rng) else {
            return node;
        };

        // Partition in place, keeping relative order on each side.
        let (mut lhs, mut rhs): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.x[i][split.feature] <= split.threshold);
        let n_left = lhs.len();
        lhs.append(&mut rhs);
        idx.copy_from_slice(&lhs);

        tree.feature_idx[node] = split.feature as i64;
        tree.threshold[node] = split.threshold;
        let (left_idx, right_idx) = idx.split_at_mut(n_left);
        let l = self.grow(tree, left_idx, depth + 1, rng);
        let r = self.grow(tree, right_idx, depth + 1, rng);
        tree.left[node] = l as i64;
        tree.right[node] = r as i64;
        node
    }

    fn best_split(&mut self, idx: &[usize], rng: &mut impl RngCore) -> Option<Split> {
        // Random feature order via Fisher-Yates; the first `m` are the subset.
        let features = &mut self.features;
        for i in (1..self.p).rev() {
            let j = rng.random_range(0..=i);
            features.swap(i, j);
        }
        let m = self
            .params
            .max_features
            .map_or(self.p, |m| m.clamp(1, self.p));
        let mut best: Option<Split> = None;
        for (rank, &f) in self.features.clone().iter().enumerate() {
            if rank >= m && best.is_some() {
                break;
            }
            if let Some(s) = self.best_split_on(idx, f) {
                if best.as_ref().is_none_or(|b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        best
    }

    /// Maximises `S_L² / n_L + S_R² / n_R`, which is equivalent to minimising
    /// the children's summed squared error.
    fn best_split_on(&mut self, idx: &[usize], feature: usize) -> Option<Split> {
        let x = self.x;
        self.order.clear();
        self.order.extend_from_slice(idx);
        self.order
            .sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let n = self.order.len();
        let min_leaf = self.params.min_samples_leaf.max(1);
        let total: f64 = self.order.iter().map(|&i| self.y[i]).sum();
        let mut left_sum = 0.0;
        let mut best: Option<Split> = None;
        for pos in 0..n - 1 {
            let i = self.order[pos];
            left_sum += self.y[i];
            let n_left = pos + 1;
            let (a, b) = (x[i][feature], x[self.order[pos + 1]][feature]);
            if a == b || n_left < min_leaf || n - n_left < min_leaf {
                continue;
            }
            let right_sum = total - left_sum;
            let score =
                left_sum * left_sum / n_left as f64 + right_sum * right_sum / (n - n_left) as f64;
            if best.as_ref().is_none_or(|s| score > s.score) {
                let mid = a + (b - a) / 2.0;
                let threshold = if mid < b { mid } else { a };
                best = Some(Split {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn depth_zero_is_mean_leaf() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = vec![1.0, 2.0, 6.0];
        let params = TreeParams {
            max_depth: Some(0),
            ..Default::default()
        };
        let t = build_tree(&x, &y, &all(3), params, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(t.n_nodes(), 1);
        assert_eq!(t.predict_row(&[5.0]), 3.0);
    }

    #[test]
    fn xor_is_fit_exactly() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![1.0, 1.0, 0.0, 0.0];
        let t = build_tree(
            &x,
            &y,
            &all(4),
            TreeParams::default(),
            &mut ChaCha8Rng::seed_from_u64(3),
        );
        for (r, v) in x.iter().zip(&y) {
            assert_eq!(t.predict_row(r), *v);
        }
        assert!(t.is_valid(2));
    }

    #[test]
    fn respects_min_leaf_and_depth() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| (i * i) as f64).collect();
        let params = TreeParams {
            max_depth: Some(3),
            min_samples_leaf: 4,
            max_features: None,
        };
        let t = build_tree(&x, &y, &all(20), params, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(t.depth() <= 3);
        // every leaf reached by at least 4 training rows
        let mut counts = vec![0; t.n_nodes()];
        for r in &x {
            let mut node = 0;
            while t.feature_idx[node] != LEAF {
                node = if r[t.feature_idx[node] as usize] <= t.threshold[node] {
                    t.left[node]
                } else {
                    t.right[node]
                } as usize;
            }
            counts[node] += 1;
        }
        for (i, c) in counts.iter().enumerate() {
            if t.feature_idx[i] == LEAF {
                assert!(*c >= 4);
            }
        }
    }

    #[test]
    fn adjacent_floats_threshold_separates() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let x = vec![vec![a], vec![b]];
        let y = vec![0.0, 1.0];
        let t = build_tree(
            &x,
            &y,
            &all(2),
            TreeParams::default(),
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert_eq!(t.predict_row(&[a]), 0.0);
        assert_eq!(t.predict_row(&[b]), 1.0);
    }
}
