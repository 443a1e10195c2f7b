use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_width, Classifier};
use crate::error::{Error, Result};
use crate::eval::kfold::{stratified_kfold, FoldPlan};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecisionTableParams {
    pub n_bins: usize,
    pub max_subset_size: usize,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for DecisionTableParams {
    fn default() -> Self {
        Self { n_bins: 10, max_subset_size: 4, cv_folds: 5, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TableEntry<T: Scalar> {
    pub key: Vec<u16>,
    pub fraction: T,
    pub count: usize,
}

/// Lookup table over equal-frequency bins of a greedily chosen feature subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DecisionTableModel<T: Scalar> {
    pub n_features: usize,
    pub features: Vec<usize>,
    /// Lower bin boundaries for each selected feature.
    pub edges: Vec<Vec<T>>,
    /// Sorted by key.
    pub entries: Vec<TableEntry<T>>,
    pub default: T,
}

/// Distinct cut points at the 1/n_bins, 2/n_bins, ... quantiles.
fn equal_frequency_edges<T: Scalar>(values: &mut [T], n_bins: usize) -> Vec<T> {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
    let n = values.len();
    let mut edges: Vec<T> = (1..n_bins).map(|b| values[(b * n / n_bins).min(n - 1)]).collect();
    edges.dedup();
    edges.retain(|e| *e > values[0]);
    edges
}

fn bin_of<T: Scalar>(edges: &[T], v: T) -> u16 {
    edges.partition_point(|&e| e <= v) as u16
}

type Counts = HashMap<Vec<u16>, (usize, usize)>;

fn key(bins: &[Vec<u16>], subset: &[usize], row: usize) -> Vec<u16> {
    subset.iter().map(|&f| bins[f][row]).collect()
}

fn count(bins: &[Vec<u16>], subset: &[usize], y: &[u8], rows: impl Iterator<Item = usize>) -> Counts {
    let mut m: Counts = HashMap::new();
    for i in rows {
        let e = m.entry(key(bins, subset, i)).or_default();
        e.0 += 1;
        e.1 += usize::from(y[i]);
    }
    m
}

/// Pooled held-out accuracy of the table induced by `subset` over the folds.
fn cv_accuracy(bins: &[Vec<u16>], subset: &[usize], y: &[u8], plan: &FoldPlan) -> f64 {
    let mut correct = 0usize;
    for f in 0..plan.k {
        let train = plan.train_indices(f);
        let table = count(bins, subset, y, train.iter().copied());
        let ones: usize = train.iter().map(|&i| usize::from(y[i])).sum();
        let default = ones as f64 / train.len().max(1) as f64;
        for i in plan.test_indices(f) {
            let frac = match table.get(&key(bins, subset, i)) {
                Some(&(n, o)) => o as f64 / n as f64,
                None => default,
            };
            correct += usize::from(u8::from(frac >= 0.5) == y[i]);
        }
    }
    correct as f64 / y.len() as f64
}

pub fn fit_decision_table<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &[u8],
    params: &DecisionTableParams,
) -> Result<DecisionTableModel<T>> {
    check_labels(x, y)?;
    if params.n_bins < 2 {
        return Err(Error::invalid(format!("n_bins must be at least 2, got {}", params.n_bins)));
    }
    if params.n_bins > u16::MAX as usize {
        return Err(Error::invalid("n_bins too large"));
    }
    if params.cv_folds < 2 || x.n_rows() < params.cv_folds {
        return Err(Error::invalid(format!(
            "decision table needs at least cv_folds = {} rows and cv_folds >= 2, got {} rows",
            params.cv_folds,
            x.n_rows()
        )));
    }
    let d = x.n_cols();
    let all_edges: Vec<Vec<T>> = (0..d)
        .map(|j| equal_frequency_edges(&mut x.column(j), params.n_bins))
        .collect();
    let bins: Vec<Vec<u16>> = (0..d)
        .map(|j| x.rows().map(|r| bin_of(&all_edges[j], r[j])).collect())
        .collect();
    let plan = stratified_kfold(y, params.cv_folds, params.seed)
        .or_else(|_| FoldPlan::round_robin(y.len(), params.cv_folds, params.seed))?;

    let mut subset: Vec<usize> = Vec::new();
    let mut current = cv_accuracy(&bins, &subset, y, &plan);
    while subset.len() < params.max_subset_size.min(d) {
        let mut best: Option<(usize, f64)> = None;
        for f in (0..d).filter(|f| !subset.contains(f)) {
            let mut trial = subset.clone();
            trial.push(f);
            let acc = cv_accuracy(&bins, &trial, y, &plan);
            if best.is_none_or(|(_, b)| acc > b) {
                best = Some((f, acc));
            }
        }
        match best {
            Some((f, acc)) if acc > current => {
                subset.push(f);
                current = acc;
            }
            _ => break,
        }
    }

    let table = count(&bins, &subset, y, 0..y.len());
    let mut entries: Vec<TableEntry<T>> = table
        .into_iter()
        .map(|(key, (n, ones))| TableEntry {
            key,
            fraction: T::from_usize_lossy(ones) / T::from_usize_lossy(n),
            count: n,
        })
        .collect();
    entries.sort_by(|a, b| a.key.cmp(&b.key));
    let ones: usize = y.iter().map(|&v| usize::from(v)).sum();
    let default = if y.is_empty() {
        T::zero()
    } else {
        T::from_usize_lossy(ones) / T::from_usize_lossy(y.len())
    };
    Ok(DecisionTableModel {
        n_features: d,
        edges: subset.iter().map(|&f| all_edges[f].clone()).collect(),
        features: subset,
        entries,
        default,
    })
}

impl<T: Scalar> DecisionTableModel<T> {
    pub fn lookup(&self, row: &[T]) -> T {
        let k: Vec<u16> = self
            .features
            .iter()
            .zip(&self.edges)
            .map(|(&f, e)| bin_of(e, row[f]))
            .collect();
        match self.entries.binary_search_by(|e| e.key.cmp(&k)) {
            Ok(i) => self.entries[i].fraction,
            Err(_) => self.default,
        }
    }
}

impl<T: Scalar> Classifier<T> for DecisionTableModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        check_width(x, self.n_features)?;
        Ok(x.rows().map(|r| self.lookup(r)).collect())
    }
}
