use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.2,
            validation: 0.2,
            test: 0.6,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let r = Self {
            train,
            validation,
            test,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::InvalidSplit(format!(
                "ratios must be positive, got {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!(
                "ratios sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    /// Part sizes for `n` items: train and validation are rounded to the
    /// nearest integer, test takes the remainder. Each part keeps at least
    /// one item.
    pub fn counts(&self, n: usize) -> [usize; 3] {
        let mut train = ((self.train * n as f64).round() as usize).max(1);
        let mut validation = ((self.validation * n as f64).round() as usize).max(1);
        while train + validation > n.saturating_sub(1) && (train > 1 || validation > 1) {
            if train >= validation {
                train -= 1;
            } else {
                validation -= 1;
            }
        }
        [train, validation, n - train - validation]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
    pub seed: u64,
    pub ratios: SplitRatios,
}

/// Uniform integer in `0..bound` by rejection sampling on raw 64-bit draws.
fn uniform_below(rng: &mut impl RngCore, bound: u64) -> u64 {
    let zone = (1u128 << 64) - ((1u128 << 64) % bound as u128);
    loop {
        let r = rng.next_u64() as u128;
        if r < zone {
            return (r % bound as u128) as u64;
        }
    }
}

/// Deterministic train/validation/test assignment of dataset names.
///
/// Names are sorted, shuffled with Fisher-Yates driven by a ChaCha8 stream
/// seeded from `seed`, then cut into consecutive parts of
/// [`SplitRatios::counts`] sizes.
pub fn split_datasets(names: &[String], seed: u64, ratios: SplitRatios) -> Result<SplitAssignment> {
    ratios.validate()?;
    let mut order: Vec<String> = names.to_vec();
    order.sort();
    if order.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSplit("dataset names must be distinct".into()));
    }
    let n = order.len();
    if n < 3 {
        return Err(Error::InvalidSplit(format!(
            "need at least 3 datasets to fill train/validation/test, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = uniform_below(&mut rng, i as u64 + 1) as usize;
        order.swap(i, j);
    }
    let [n_train, n_val, _] = ratios.counts(n);
    let test = order.split_off(n_train + n_val);
    let validation = order.split_off(n_train);
    Ok(SplitAssignment {
        train: order,
        validation,
        test,
        seed,
        ratios,
    })
}
