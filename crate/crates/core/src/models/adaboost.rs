use serde::{Deserialize, Serialize};

use super::tree::{class_fraction, grow, labels_as, Criterion, GrowParams, Tree};
use super::{check_width, Classifier};
use crate::dataset::class_counts;
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::{sigmoid, Scalar};

/// Error floor used when a stump is perfect.
const PERFECT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        Self { n_estimators: 50 }
    }
}

/// Discrete AdaBoost over depth-1 trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AdaBoostModel<T: Scalar> {
    pub n_features: usize,
    pub stumps: Vec<Tree<T>>,
    pub alphas: Vec<T>,
    /// Weighted training error of each accepted stump.
    pub errors: Vec<T>,
}

/// Per-round record of a fit: sample weights after each accepted round.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostTrace<T> {
    pub weights: Vec<Vec<T>>,
}

fn vote<T: Scalar>(stump: &Tree<T>, row: &[T]) -> T {
    if stump.value(row) >= T::half() {
        T::one()
    } else {
        -T::one()
    }
}

pub fn fit_adaboost<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], params: &AdaBoostParams) -> Result<AdaBoostModel<T>> {
    fit_adaboost_traced(x, y, params).map(|(m, _)| m)
}

pub fn fit_adaboost_traced<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[u8],
    params: &AdaBoostParams,
) -> Result<(AdaBoostModel<T>, AdaBoostTrace<T>)> {
    check_labels(x, y)?;
    let counts = class_counts(y);
    if counts.n_negative == 0 || counts.n_positive == 0 {
        return Err(Error::fit("AdaBoost needs both classes in the training labels"));
    }
    let n = x.n_rows();
    let targets = labels_as::<T>(y);
    let signs: Vec<T> = y.iter().map(|&v| if v == 1 { T::one() } else { -T::one() }).collect();
    let mut w = vec![T::one() / T::from_usize_lossy(n); n];
    let stump_params = GrowParams { max_depth: Some(1), min_samples_split: 2, max_features: None };
    let mut model = AdaBoostModel { n_features: x.n_cols(), stumps: Vec::new(), alphas: Vec::new(), errors: Vec::new() };
    let mut trace = AdaBoostTrace { weights: Vec::new() };
    for _ in 0..params.n_estimators {
        let stump = grow(x, &targets, &w, (0..n).collect(), Criterion::Gini, stump_params, None, |rows| {
            class_fraction(&targets, &w, rows)
        });
        let h: Vec<T> = x.rows().map(|r| vote(&stump, r)).collect();
        let eps: T = (0..n).filter(|&i| h[i] != signs[i]).map(|i| w[i]).sum();
        if eps >= T::half() {
            break;
        }
        let perfect = eps <= T::zero();
        let e = if perfect { T::lit(PERFECT_EPS) } else { eps };
        let alpha = T::half() * ((T::one() - e) / e).ln();
        for i in 0..n {
            w[i] *= (-alpha * signs[i] * h[i]).exp();
        }
        let total: T = w.iter().copied().sum();
        for v in &mut w {
            *v /= total;
        }
        model.stumps.push(stump);
        model.alphas.push(alpha);
        model.errors.push(eps);
        trace.weights.push(w.clone());
        if perfect {
            break;
        }
    }
    Ok((model, trace))
}

impl<T: Scalar> AdaBoostModel<T> {
    /// Σ α_t h_t(x).
    pub fn margin(&self, row: &[T]) -> T {
        self.stumps.iter().zip(&self.alphas).map(|(s, &a)| a * vote(s, row)).sum()
    }
}

impl<T: Scalar> Classifier<T> for AdaBoostModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        check_width(x, self.n_features)?;
        Ok(x.rows().map(|r| sigmoid(T::lit(2.0) * self.margin(r))).collect())
    }

    /// Sign of the margin, with zero counted as class 1.
    fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<u8>> {
        check_width(x, self.n_features)?;
        Ok(x.rows().map(|r| u8::from(self.margin(r) >= T::zero())).collect())
    }
}
