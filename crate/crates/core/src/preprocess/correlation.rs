use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::Scalar;

/// Pearson's r, or `None` when either input is constant.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    Some(r.max(-T::one()).min(T::one()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CorrelationReport<T: Scalar> {
    pub col_names: Vec<String>,
    /// r of each column against the 0/1 target.
    pub with_target: Vec<T>,
    /// Column-by-column r, symmetric with unit diagonal (0 for constant columns).
    pub pairwise: Vec<Vec<T>>,
    /// Columns reported as r = 0 because they are constant.
    pub constant_cols: Vec<usize>,
}

pub fn pearson_correlation<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8]) -> Result<CorrelationReport<T>> {
    check_labels(x, y)?;
    if x.n_rows() < 2 {
        return Err(Error::invalid("correlation needs at least 2 rows"));
    }
    let cols: Vec<Vec<T>> = (0..x.n_cols()).map(|j| x.column(j)).collect();
    let target: Vec<T> = y.iter().map(|&v| T::from_u8(v).unwrap_or_else(T::zero)).collect();
    let constant_cols: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.iter().all(|&v| v == c[0]))
        .map(|(j, _)| j)
        .collect();
    let with_target = cols
        .iter()
        .map(|c| pearson(c, &target).unwrap_or_else(T::zero))
        .collect();
    let d = cols.len();
    let mut pairwise = vec![vec![T::zero(); d]; d];
    for a in 0..d {
        for b in a..d {
            let r = if a == b {
                if constant_cols.contains(&a) { T::zero() } else { T::one() }
            } else {
                pearson(&cols[a], &cols[b]).unwrap_or_else(T::zero)
            };
            pairwise[a][b] = r;
            pairwise[b][a] = r;
        }
    }
    Ok(CorrelationReport {
        col_names: x.col_names().to_vec(),
        with_target,
        pairwise,
        constant_cols,
    })
}
