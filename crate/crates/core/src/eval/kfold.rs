use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::class_counts;
use crate::error::{Error, Result};
use crate::rng;

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn n_rows(&self) -> usize {
        self.folds.len()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.folds.len()).filter(|&i| self.folds[i] != fold).collect()
    }

    /// Shuffled rows dealt round-robin, ignoring labels.
    pub fn round_robin(n_rows: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 || n_rows < k {
            return Err(Error::invalid(format!("cannot split {n_rows} rows into {k} folds")));
        }
        let mut idx: Vec<usize> = (0..n_rows).collect();
        idx.shuffle(&mut rng::seeded(seed));
        let mut folds = vec![0; n_rows];
        for (j, &i) in idx.iter().enumerate() {
            folds[i] = j % k;
        }
        Ok(Self { k, folds, seed })
    }
}

/// Per class (0 then 1): shuffle with a class-specific stream and deal into
/// folds round-robin. Dealing continues where the previous class stopped,
/// so fold sizes also stay within one of each other.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    let counts = class_counts(labels);
    for (name, n) in [("0", counts.n_negative), ("1", counts.n_positive)] {
        if n < k {
            return Err(Error::invalid(format!(
                "class {name} has {n} rows, fewer than k = {k} folds"
            )));
        }
    }
    let mut folds = vec![0; labels.len()];
    let mut offset = 0;
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng::stream(seed, u64::from(class)));
        for (j, &i) in idx.iter().enumerate() {
            folds[i] = (offset + j) % k;
        }
        offset += idx.len();
    }
    Ok(FoldPlan { k, folds, seed })
}
