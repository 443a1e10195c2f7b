use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::Scalar;

/// Chi-squared statistic of each non-negative column against the binary
/// labels, treating column sums per class as observed frequencies.
pub fn chi2_scores<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8]) -> Result<Vec<T>> {
    check_labels(x, y)?;
    let d = x.n_cols();
    let n = x.n_rows();
    let mut observed = vec![[T::zero(); 2]; d];
    for (row, &label) in x.rows().zip(y) {
        for (j, &v) in row.iter().enumerate() {
            if v < T::zero() {
                return Err(Error::invalid(format!(
                    "chi-squared needs non-negative features; column {:?} has {v}",
                    x.col_names()[j]
                )));
            }
            observed[j][label as usize] += v;
        }
    }
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let class_frac = [
        T::from_usize_lossy(n - n1) / T::from_usize_lossy(n.max(1)),
        T::from_usize_lossy(n1) / T::from_usize_lossy(n.max(1)),
    ];
    Ok(observed
        .iter()
        .map(|obs| {
            let total = obs[0] + obs[1];
            if total == T::zero() {
                return T::zero();
            }
            (0..2)
                .map(|c| {
                    let expected = class_frac[c] * total;
                    if expected > T::zero() {
                        let diff = obs[c] - expected;
                        diff * diff / expected
                    } else {
                        T::zero()
                    }
                })
                .fold(T::zero(), |a, b| a + b)
        })
        .collect())
}

/// Keeps the `k` columns with the highest chi-squared score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KBestSelector {
    pub k: usize,
    /// Indices into the fit-time columns, ascending.
    pub kept: Vec<usize>,
    pub kept_names: Vec<String>,
    pub input_names: Vec<String>,
    pub scores: Vec<f64>,
}

impl KBestSelector {
    /// Reorders to the fit-time layout and keeps the selected columns.
    pub fn apply<T: Scalar>(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        if x.col_names() != self.input_names.as_slice() {
            return Err(Error::invalid(format!(
                "selector fitted on columns {:?}, got {:?}",
                self.input_names,
                x.col_names()
            )));
        }
        Ok(x.select_columns(&self.kept))
    }

    /// Selected indices ordered best score first (ties: lower index first).
    pub fn ranked(&self) -> Vec<usize> {
        rank(&self.scores)
    }
}

fn rank(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

pub fn select_k_best<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], k: usize) -> Result<KBestSelector> {
    if k == 0 || k > x.n_cols() {
        return Err(Error::invalid(format!(
            "k = {k} outside 1..={} available columns",
            x.n_cols()
        )));
    }
    let scores: Vec<f64> = chi2_scores(x, y)?.into_iter().map(Scalar::as_f64).collect();
    Ok(selector_from_scores(&scores, k, x.col_names()))
}

pub(crate) fn selector_from_scores(scores: &[f64], k: usize, names: &[String]) -> KBestSelector {
    let mut kept: Vec<usize> = rank(scores).into_iter().take(k).collect();
    kept.sort_unstable();
    KBestSelector {
        k,
        kept_names: kept.iter().map(|&j| names[j].clone()).collect(),
        kept,
        input_names: names.to_vec(),
        scores: scores.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn observed_equals_expected_scores_zero() {
        let x = FeatureMatrix::<f64>::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(chi2_scores(&x, &[1, 0, 0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn hand_computed_case() {
        let x = FeatureMatrix::<f64>::from_rows(&[vec![1.0], vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        assert_eq!(chi2_scores(&x, &[1, 0, 1, 0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn zero_column_and_errors() {
        let x = FeatureMatrix::<f64>::from_rows(&[vec![0.0, -1.0], vec![0.0, 1.0]]).unwrap();
        assert!(chi2_scores(&x, &[0, 1]).is_err());
        let x = FeatureMatrix::<f64>::from_rows(&[vec![0.0], vec![0.0]]).unwrap();
        assert_eq!(chi2_scores(&x, &[0, 1]).unwrap(), vec![0.0]);
        assert!(chi2_scores(&x, &[0]).is_err());
    }

    #[test]
    fn top_k_by_score() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let s = selector_from_scores(&[5.0, 1.0, 9.0], 2, &names);
        assert_eq!(s.kept, vec![0, 2]);
        assert_eq!(s.ranked()[..2], [2, 0]);
        // ties: lower index wins
        let s = selector_from_scores(&[1.0, 3.0, 3.0], 1, &names);
        assert_eq!(s.kept, vec![1]);
    }

    #[test]
    fn k_equal_to_width_is_identity_and_range_checked() {
        let x = FeatureMatrix::<f64>::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let s = select_k_best(&x, &[0, 1], 3).unwrap();
        assert_eq!(s.apply(&x).unwrap(), x);
        assert!(select_k_best(&x, &[0, 1], 0).is_err());
        assert!(select_k_best(&x, &[0, 1], 4).is_err());
    }

    proptest! {
        #[test]
        fn scores_nonnegative_linear_and_selection_scale_invariant(
            rows in proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, 4), 4..60),
            label_bits in any::<u64>(),
            alpha in 0.01f64..100.0,
        ) {
            let n = rows.len();
            let y: Vec<u8> = (0..n).map(|i| ((label_bits >> (i % 64)) & 1) as u8).collect();
            let x = FeatureMatrix::from_rows(&rows).unwrap();
            let base = chi2_scores(&x, &y).unwrap();
            prop_assert!(base.iter().all(|&s| s >= 0.0));
            let scaled = x.map(|_, v| v * alpha);
            let s2 = chi2_scores(&scaled, &y).unwrap();
            for (a, b) in base.iter().zip(&s2) {
                prop_assert!((b - alpha * a).abs() <= 1e-9 * (1.0 + alpha * a));
            }
            let k = 2;
            let sel_a = select_k_best(&x, &y, k).unwrap().kept;
            let sel_b = select_k_best(&scaled, &y, k).unwrap().kept;
            // identical unless two scores are within rounding of each other
            let mut sorted = base.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            if (sorted[k - 1] - sorted[k]).abs() > 1e-9 * (1.0 + sorted[k - 1]) {
                prop_assert_eq!(sel_a, sel_b);
            }
        }
    }
}
