//! Fixed-size fingerprints of time-series classification datasets and the
//! regressors that map them to expected algorithm accuracy and its
//! fold-to-fold spread.
//!
//! The pipeline has three stages:
//!
//! 1. [`fingerprint`] reduces a dataset to a 44-number vector (instance
//!    statistics, aggregated per class, then across classes, plus shape
//!    counts). Only this vector needs to leave the data owner.
//! 2. [`targets`] turns per-fold accuracies of each candidate algorithm into
//!    regression targets (mean, std, percentiles) and the constant
//!    single-best-solver baseline.
//! 3. [`regress`] and [`evalreport`] fit one regressor per
//!    (algorithm, statistic), select on a validation split, and report test
//!    MAE against the baseline.

pub mod dataio;
pub mod error;
pub mod evalreport;
pub mod fingerprint;
pub mod regress;
pub mod stats;
pub mod synthetic;
pub mod targets;

pub use error::{Error, Result};
