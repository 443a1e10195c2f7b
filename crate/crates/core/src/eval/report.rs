use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{binary_metrics, confusion, ConfusionMatrix};
use super::roc::roc_auc;
use crate::dataset::class_counts;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Metrics of one model on one evaluation set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Missing when the evaluation set holds a single class.
    pub auc: Option<f64>,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_scores: Option<Vec<f64>>,
}

pub fn evaluate<T: Scalar>(y_true: &[u8], scores: &[T], y_pred: &[u8]) -> Result<EvalReport> {
    if scores.len() != y_true.len() {
        return Err(Error::invalid(format!("{} labels but {} scores", y_true.len(), scores.len())));
    }
    let cm = confusion(y_true, y_pred)?;
    let m = binary_metrics(&cm)?;
    let c = class_counts(y_true);
    let auc = if c.n_positive > 0 && c.n_negative > 0 {
        Some(roc_auc(y_true, scores)?.auc)
    } else {
        None
    };
    Ok(EvalReport {
        confusion: cm,
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        auc,
        precision_undefined: m.precision_undefined,
        recall_undefined: m.recall_undefined,
        fold_scores: None,
    })
}

/// One line of `metrics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow<'a> {
    pub model: &'a str,
    /// `holdout`, `train`, or `fold<i>`.
    pub split: String,
    pub report: &'a EvalReport,
}

pub const METRICS_HEADER: [&str; 12] = [
    "model", "split", "accuracy", "precision", "recall", "f1", "auc", "tp", "tn", "fp", "fn", "flags",
];

fn flags(r: &EvalReport) -> String {
    let mut f = Vec::new();
    if r.precision_undefined {
        f.push("precision_0_over_0");
    }
    if r.recall_undefined {
        f.push("recall_0_over_0");
    }
    f.join(";")
}

pub fn write_metrics_csv<W: Write>(rows: &[MetricsRow<'_>], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(METRICS_HEADER)?;
    for row in rows {
        let r = row.report;
        w.write_record([
            row.model.to_string(),
            row.split.clone(),
            r.accuracy.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.f1.to_string(),
            r.auc.map(|a| a.to_string()).unwrap_or_default(),
            r.confusion.tp.to_string(),
            r.confusion.tn.to_string(),
            r.confusion.fp.to_string(),
            r.confusion.fn_.to_string(),
            flags(r),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Markdown table with one line per (name, report).
pub fn markdown_table(rows: &[(&str, &EvalReport)]) -> String {
    let mut s = String::from("| model | accuracy | precision | recall | f1 | auc |\n|---|---|---|---|---|---|\n");
    for (name, r) in rows {
        s.push_str(&format!(
            "| {name} | {} | {} | {} | {} | {} |\n",
            fmt4(r.accuracy),
            fmt4(r.precision),
            fmt4(r.recall),
            fmt4(r.f1),
            r.auc.map(fmt4).unwrap_or_else(|| "n/a".into()),
        ));
    }
    s
}
