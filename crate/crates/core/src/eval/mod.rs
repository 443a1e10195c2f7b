//! Evaluation: confusion counts and derived metrics, ROC/AUC, stratified
//! k-fold plans, cross-validation and paired t-tests over fold scores.

pub mod cv;
pub mod kfold;
pub mod metrics;
pub mod report;
pub mod roc;
pub mod ttest;

pub use cv::{cross_validate, CvSummary};
pub use kfold::{stratified_kfold, FoldPlan};
pub use metrics::{binary_metrics, confusion, BinaryMetrics, ConfusionMatrix};
pub use report::{evaluate, EvalReport};
pub use roc::{roc_auc, RocCurve};
pub use ttest::{paired_t_test, TTest};
