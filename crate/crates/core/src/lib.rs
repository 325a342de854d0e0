//! Resampling toolkit for imbalanced binary datasets.
//!
//! The crate covers the whole loop of an imbalance study:
//!
//! * [`data`]: datasets, CSV input, stratified splits, feature statistics and
//!   Gaussian-mixture generators.
//! * [`neighbors`] and [`silhouette`]: brute-force nearest neighbours and
//!   per-sample silhouette coefficients over the class partition.
//! * [`undersample`]: silhouette-ordered removal and the progressive
//!   imbalance sweep.
//! * [`oversample`]: SMOTE, ADASYN, G1No and G1No Gourmet.
//! * [`evaluator`]: a small fixed-shape MLP, classification metrics, ROC/AUC,
//!   Pearson matrices and k-fold cross-validation.
//!
//! Every stochastic step takes an explicit seed.

pub mod data;
pub mod error;
pub mod evaluator;
pub mod experiment;
pub mod export;
pub mod matrix;
pub mod neighbors;
pub mod oversample;
pub mod rng;
pub mod silhouette;
pub mod undersample;

pub use data::{class_counts, imbalance_degree, ClassCounts, Dataset, Tag};
pub use error::{Error, ErrorKind, Result};
pub use matrix::Matrix;
pub use oversample::{rebalance, Algorithm, OversampleConfig, SyntheticBatch};
