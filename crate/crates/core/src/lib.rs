//! Tabular binary-classification toolkit built around a daily weather
//! dataset: typed CSV loading, fit-on-train preprocessing, class-imbalance
//! resampling, seven classifiers behind one contract, and an evaluation
//! stack (metrics, ROC/AUC, stratified k-fold, paired t-tests).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the experiment runner uses.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod matrix;
pub mod models;
pub mod preprocess;
pub mod resample;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureMatrix = matrix::FeatureMatrix<f64>;
pub type Model = models::Model<f64>;
pub type Tree = models::tree::Tree<f64>;
pub type MinMaxScaler = preprocess::scale::MinMaxScaler<f64>;
pub type RocCurve = eval::roc::RocCurve;
