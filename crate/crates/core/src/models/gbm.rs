use serde::{Deserialize, Serialize};

use super::tree::{grow, Criterion, GrowParams, Tree};
use super::{check_width, Classifier, MaxFeatures};
use crate::dataset::class_counts;
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::rng;
use crate::scalar::{sigmoid, Scalar};

const LEAF_CLAMP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbmParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// Features drawn per split.
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            learning_rate: 0.1,
            max_depth: 2,
            max_features: MaxFeatures::Count(2),
            seed: 0,
        }
    }
}

/// Gradient boosting on binomial deviance. Leaves hold Newton steps; the
/// learning rate is applied at score time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GbmModel<T: Scalar> {
    pub n_features: usize,
    pub f0: T,
    pub learning_rate: T,
    pub trees: Vec<Tree<T>>,
    /// Mean training log-loss before the first round and after each round.
    #[serde(default)]
    pub train_loss: Vec<T>,
}

fn log_loss<T: Scalar>(f: &[T], y: &[T]) -> T {
    let n = T::from_usize_lossy(f.len());
    f.iter()
        .zip(y)
        .map(|(&z, &t)| z.max(T::zero()) + (-z.abs()).exp().ln_1p() - t * z)
        .sum::<T>()
        / n
}

pub fn fit_gbm<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], params: &GbmParams) -> Result<GbmModel<T>> {
    check_labels(x, y)?;
    let counts = class_counts(y);
    if counts.n_negative == 0 || counts.n_positive == 0 {
        return Err(Error::fit("gradient boosting needs both classes in the training labels"));
    }
    let n = x.n_rows();
    let p_bar = T::from_usize_lossy(counts.n_positive) / T::from_usize_lossy(n);
    let f0 = (p_bar / (T::one() - p_bar)).ln();
    let lr = T::lit(params.learning_rate);
    let clamp = T::lit(LEAF_CLAMP);
    let targets: Vec<T> = y.iter().map(|&v| if v == 1 { T::one() } else { T::zero() }).collect();
    let ones = vec![T::one(); n];
    let grow_params = GrowParams {
        max_depth: Some(params.max_depth),
        min_samples_split: 2,
        max_features: Some(params.max_features.resolve(x.n_cols())),
    };
    let mut f = vec![f0; n];
    let mut trees = Vec::with_capacity(params.n_estimators);
    let mut train_loss = vec![log_loss(&f, &targets)];
    for round in 0..params.n_estimators {
        let p: Vec<T> = f.iter().map(|&z| sigmoid(z)).collect();
        let residuals: Vec<T> = targets.iter().zip(&p).map(|(&t, &pi)| t - pi).collect();
        let mut r = rng::stream(params.seed, round as u64);
        let tree = grow(
            x,
            &residuals,
            &ones,
            (0..n).collect(),
            Criterion::SquaredError,
            grow_params,
            Some(&mut r),
            |rows| {
                let num: T = rows.iter().map(|&i| residuals[i]).sum();
                let den: T = rows.iter().map(|&i| p[i] * (T::one() - p[i])).sum();
                if den > T::zero() {
                    (num / den).max(-clamp).min(clamp)
                } else {
                    T::zero()
                }
            },
        );
        for (fi, row) in f.iter_mut().zip(x.rows()) {
            *fi += lr * tree.value(row);
        }
        let loss = log_loss(&f, &targets);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!("gradient boosting loss became non-finite at round {round}")));
        }
        train_loss.push(loss);
        trees.push(tree);
    }
    Ok(GbmModel { n_features: x.n_cols(), f0, learning_rate: lr, trees, train_loss })
}

impl<T: Scalar> GbmModel<T> {
    /// Log-odds using only the first `rounds` trees.
    pub fn raw_at_round(&self, row: &[T], rounds: usize) -> T {
        self.trees
            .iter()
            .take(rounds)
            .fold(self.f0, |acc, t| acc + self.learning_rate * t.value(row))
    }

    pub fn score_at_round(&self, x: &FeatureMatrix<T>, rounds: usize) -> Result<Vec<T>> {
        check_width(x, self.n_features)?;
        Ok(x.rows().map(|r| sigmoid(self.raw_at_round(r, rounds))).collect())
    }
}

impl<T: Scalar> Classifier<T> for GbmModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        self.score_at_round(x, self.trees.len())
    }
}
