use serde::{Deserialize, Serialize};

use super::{check_width, Classifier};
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::{sigmoid, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogregParams {
    pub learning_rate: f64,
    pub n_iters: usize,
    pub l2: f64,
}

impl Default for LogregParams {
    fn default() -> Self {
        Self { learning_rate: 0.1, n_iters: 1000, l2: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LogregModel<T: Scalar> {
    pub weights: Vec<T>,
    pub bias: T,
    /// Training loss before each update, plus the final loss.
    #[serde(default)]
    pub loss_history: Vec<T>,
}

/// ln(1 + e^z) without overflow.
fn softplus<T: Scalar>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// Mean cross-entropy plus `l2/2 · ||w||²`, with its gradient in `w` and `b`.
pub fn loss_and_grad<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], w: &[T], b: T, l2: T) -> (T, Vec<T>, T) {
    let n = T::from_usize_lossy(x.n_rows().max(1));
    let mut loss = T::zero();
    let mut gw = vec![T::zero(); w.len()];
    let mut gb = T::zero();
    for (row, &yi) in x.rows().zip(y) {
        let z = row.iter().zip(w).fold(b, |acc, (&a, &c)| acc + a * c);
        let t = if yi == 1 { T::one() } else { T::zero() };
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, &a) in gw.iter_mut().zip(row) {
            *g += r * a;
        }
        gb += r;
    }
    let norm: T = w.iter().map(|&v| v * v).sum();
    loss = loss / n + l2 * T::half() * norm;
    for (g, &v) in gw.iter_mut().zip(w) {
        *g = *g / n + l2 * v;
    }
    (loss, gw, gb / n)
}

/// Full-batch gradient descent from zero weights.
pub fn fit_logreg<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], params: &LogregParams) -> Result<LogregModel<T>> {
    check_labels(x, y)?;
    if x.n_rows() == 0 {
        return Err(Error::fit("cannot fit logistic regression on zero rows"));
    }
    let lr = T::lit(params.learning_rate);
    let l2 = T::lit(params.l2);
    let mut w = vec![T::zero(); x.n_cols()];
    let mut b = T::zero();
    let mut history = Vec::with_capacity(params.n_iters + 1);
    for iter in 0..=params.n_iters {
        let (loss, gw, gb) = loss_and_grad(x, y, &w, b, l2);
        if !loss.is_finite() {
            return Err(Error::Numeric(format!(
                "logistic regression loss became non-finite at iteration {iter}; try a lower learning_rate than {}",
                params.learning_rate
            )));
        }
        history.push(loss);
        if iter == params.n_iters {
            break;
        }
        for (wj, g) in w.iter_mut().zip(gw) {
            *wj -= lr * g;
        }
        b -= lr * gb;
    }
    Ok(LogregModel { weights: w, bias: b, loss_history: history })
}

impl<T: Scalar> Classifier<T> for LogregModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        check_width(x, self.weights.len())?;
        Ok(x.rows()
            .map(|r| sigmoid(r.iter().zip(&self.weights).fold(self.bias, |acc, (&a, &c)| acc + a * c)))
            .collect())
    }
}
