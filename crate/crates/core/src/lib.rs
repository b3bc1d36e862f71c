//! Classifier-agnostic toolkit for learning from class-imbalanced data with
//! a small labeled set and a large unlabeled pool.
//!
//! The pieces compose in layers:
//!
//! * [`dataset`] — labeled/unlabeled containers, ingestion, label
//!   normalization, stratified splitting, and synthetic benchmarks;
//! * [`classifier`] — a deterministic softmax MLP trained with Adam;
//! * [`selftrain`] — class-rebalancing pseudo-label selection (`naive`,
//!   `ISDL`, `ISDLplus`) and the generation loop;
//! * [`metrics`] — multiclass accuracy, one-vs-rest rates, ROC/AUC, top-k;
//! * [`shap`] — kernel-based Shapley attribution with an exact oracle;
//! * [`dedup`] — content-hash duplicate detection across dataset files.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below pin the common double-precision instantiations.

pub mod classifier;
pub mod dataset;
pub mod dedup;
pub mod error;
pub mod fmt;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod selftrain;
pub mod shap;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision matrix.
pub type Matrix64 = linalg::Matrix<f64>;
/// Double-precision labeled dataset.
pub type LabeledDataset64 = dataset::LabeledDataset<f64>;
/// Double-precision unlabeled pool.
pub type UnlabeledPool64 = dataset::UnlabeledPool<f64>;
/// Double-precision classifier.
pub type MlpClassifier64 = classifier::MlpClassifier<f64>;
/// Double-precision metrics report.
pub type MetricsReport64 = metrics::MetricsReport<f64>;
/// Double-precision attribution explanation.
pub type Explanation64 = shap::Explanation<f64>;
