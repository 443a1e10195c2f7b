use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// Binary target vector; 1 is the positive class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    values: Vec<u8>,
    positive_meaning: String,
}

impl LabelVector {
    pub fn new(values: Vec<u8>, positive_meaning: impl Into<String>) -> Self {
        debug_assert!(values.iter().all(|&v| v <= 1));
        Self {
            values,
            positive_meaning: positive_meaning.into(),
        }
    }

    pub fn positive_meaning(&self) -> &str {
        &self.positive_meaning
    }

    pub fn take(&self, idx: &[usize]) -> Self {
        Self {
            values: idx.iter().map(|&i| self.values[i]).collect(),
            positive_meaning: self.positive_meaning.clone(),
        }
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.values
    }
}

impl From<Vec<u8>> for LabelVector {
    fn from(values: Vec<u8>) -> Self {
        Self::new(values, "1")
    }
}

impl Deref for LabelVector {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub n_negative: usize,
    pub n_positive: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.n_negative + self.n_positive
    }

    pub fn minority(&self) -> usize {
        self.n_negative.min(self.n_positive)
    }
}

pub fn class_counts(labels: &[u8]) -> ClassCounts {
    let n_positive = labels.iter().filter(|&&v| v == 1).count();
    ClassCounts {
        n_negative: labels.len() - n_positive,
        n_positive,
    }
}
