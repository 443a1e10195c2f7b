use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kfold::FoldPlan;
use super::report::{evaluate, EvalReport};
use crate::dataset::LabelVector;
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::models::{Classifier, ClassifierSpec};
use crate::resample::{resample, ResamplePlan};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    /// Applied to each fold's training rows only.
    pub resample: ResamplePlan,
    /// Evaluate on at most this many rows of each held-out fold.
    pub test_cap: Option<usize>,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { resample: ResamplePlan::none(), test_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub folds: Vec<EvalReport>,
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation (n − 1).
    pub std_accuracy: f64,
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Fits on the rows outside each fold and evaluates on the fold. Fold `f`
/// seeds its model and resampler from `derive_seed(·, f)`, so folds may run
/// in any order or in parallel with the same result.
pub fn cross_validate<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[u8],
    spec: &ClassifierSpec,
    plan: &FoldPlan,
    opts: &CvOptions,
) -> Result<CvSummary> {
    check_labels(x, y)?;
    if plan.n_rows() != y.len() {
        return Err(Error::invalid(format!(
            "fold plan covers {} rows, labels have {}",
            plan.n_rows(),
            y.len()
        )));
    }
    spec.validate()?;
    opts.resample.validate()?;
    let folds: Vec<EvalReport> = (0..plan.k)
        .into_par_iter()
        .map(|f| {
            let train = plan.train_indices(f);
            let mut test = plan.test_indices(f);
            if let Some(cap) = opts.test_cap {
                if test.len() > cap {
                    test.shuffle(&mut rng::stream(plan.seed, 1000 + f as u64));
                    test.truncate(cap);
                    test.sort_unstable();
                }
            }
            let x_train = x.take_rows(&train);
            let y_train = LabelVector::from(train.iter().map(|&i| y[i]).collect::<Vec<u8>>());
            let fold_plan = opts.resample.with_seed(rng::derive_seed(opts.resample.seed, f as u64));
            let (x_fit, y_fit) = resample(&x_train, &y_train, &fold_plan)?;
            let model = spec
                .with_seed(rng::derive_seed(plan.seed, f as u64))
                .fit(&x_fit, &y_fit)?;
            let x_test = x.take_rows(&test);
            let y_test: Vec<u8> = test.iter().map(|&i| y[i]).collect();
            let scores = model.score(&x_test)?;
            let preds = model.predict(&x_test)?;
            evaluate(&y_test, &scores, &preds)
        })
        .collect::<Result<_>>()?;
    let accuracies: Vec<f64> = folds.iter().map(|r| r.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accuracies);
    Ok(CvSummary { folds, accuracies, mean_accuracy, std_accuracy })
}
