use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{class_fraction, grow, labels_as, Criterion, GrowParams, Tree};
use super::{check_width, Classifier, MaxFeatures};
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for RandomForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: Some(4),
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            min_samples_split: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RandomForestModel<T: Scalar> {
    pub n_features: usize,
    pub trees: Vec<Tree<T>>,
}

/// Bagged CART ensemble. Tree `t` draws its bootstrap sample and split
/// features from a stream derived from `(seed, t)`, so results do not
/// depend on thread scheduling.
pub fn fit_random_forest<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[u8],
    params: &RandomForestParams,
) -> Result<RandomForestModel<T>> {
    check_labels(x, y)?;
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::fit("random forest needs at least 2 rows"));
    }
    let targets = labels_as::<T>(y);
    let weights = vec![T::one(); n];
    let grow_params = GrowParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: Some(params.max_features.resolve(x.n_cols())),
    };
    let trees = (0..params.n_estimators as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(params.seed, t);
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| r.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(x, &targets, &weights, rows, Criterion::Gini, grow_params, Some(&mut r), |leaf| {
                class_fraction(&targets, &weights, leaf)
            })
        })
        .collect();
    Ok(RandomForestModel { n_features: x.n_cols(), trees })
}

impl<T: Scalar> Classifier<T> for RandomForestModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        check_width(x, self.n_features)?;
        let m = T::from_usize_lossy(self.trees.len());
        Ok(x.rows()
            .map(|r| self.trees.iter().map(|t| t.value(r)).sum::<T>() / m)
            .collect())
    }
}
