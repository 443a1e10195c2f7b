use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::class_counts;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// ROC curve from (0,0) to (1,1) with one point per distinct score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub auc: f64,
    /// (false positive rate, true positive rate)
    pub points: Vec<(f64, f64)>,
}

/// Tied scores move the curve diagonally, which makes the trapezoid area
/// equal to (concordant + ½ tied) / (n₁ n₀). The area is accumulated in
/// integer counts and divided once.
pub fn roc_auc<T: Scalar>(y_true: &[u8], scores: &[T]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::invalid(format!("{} labels but {} scores", y_true.len(), scores.len())));
    }
    let counts = class_counts(y_true);
    let (n1, n0) = (counts.n_positive, counts.n_negative);
    if n1 == 0 || n0 == 0 {
        return Err(Error::invalid("AUC is undefined when only one class is present"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite"));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u128, 0u128);
    let mut twice_area = 0u128;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        twice_area += (fp - prev_fp) * (tp + prev_tp);
        points.push((fp as f64 / n0 as f64, tp as f64 / n1 as f64));
    }
    let auc = twice_area as f64 / (2.0 * n1 as f64 * n0 as f64);
    Ok(RocCurve { auc, points })
}

impl RocCurve {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["fpr", "tpr"])?;
        for (f, t) in &self.points {
            w.write_record([f.to_string(), t.to_string()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}
