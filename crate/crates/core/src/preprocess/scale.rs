use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::scalar::Scalar;

/// Per-column min/max learned at fit time. Maps each column affinely onto
/// [0, 1]; constant columns map to 0 and out-of-range values are clipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MinMaxScaler<T: Scalar> {
    pub col_names: Vec<String>,
    pub min: Vec<T>,
    pub max: Vec<T>,
}

impl<T: Scalar> MinMaxScaler<T> {
    pub fn fit(x: &FeatureMatrix<T>) -> Self {
        let d = x.n_cols();
        let mut min = vec![T::infinity(); d];
        let mut max = vec![T::neg_infinity(); d];
        for row in x.rows() {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        if x.n_rows() == 0 {
            min.fill(T::zero());
            max.fill(T::zero());
        }
        Self {
            col_names: x.col_names().to_vec(),
            min,
            max,
        }
    }

    #[inline]
    pub fn scale_value(&self, j: usize, v: T) -> T {
        let span = self.max[j] - self.min[j];
        if span > T::zero() {
            ((v - self.min[j]) / span).max(T::zero()).min(T::one())
        } else {
            T::zero()
        }
    }

    pub fn apply(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        if x.col_names() != self.col_names.as_slice() {
            return Err(Error::invalid(format!(
                "scaler fitted on columns {:?}, got {:?}",
                self.col_names,
                x.col_names()
            )));
        }
        Ok(x.map(|j, v| self.scale_value(j, v)))
    }
}

pub fn minmax_scale<T: Scalar>(x: &FeatureMatrix<T>) -> (MinMaxScaler<T>, FeatureMatrix<T>) {
    let scaler = MinMaxScaler::fit(x);
    let scaled = scaler.apply(x).expect("same columns as fit");
    (scaler, scaled)
}
