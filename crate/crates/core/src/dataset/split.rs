use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub ratio: f64,
}

/// Stratified shuffle split. Each class contributes `round(n_c * ratio)`
/// rows to train; both index lists come back sorted.
pub fn split_holdout(n_rows: usize, labels: &[u8], ratio: f64, seed: u64) -> Result<SplitPair> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio {ratio} outside (0, 1)")));
    }
    if labels.len() != n_rows {
        return Err(Error::invalid(format!(
            "labels length {} does not match n_rows {n_rows}",
            labels.len()
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0u8..=1 {
        let mut members: Vec<usize> = (0..n_rows).filter(|&i| labels[i] == class).collect();
        if members.len() < 2 {
            return Err(Error::invalid(format!(
                "class {class} has {} member(s); stratified split needs at least 2",
                members.len()
            )));
        }
        members.shuffle(&mut rng::stream(seed, class as u64));
        let n_train = ((members.len() as f64) * ratio).round() as usize;
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitPair {
        train_indices: train,
        test_indices: test,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_balanced_split() {
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let s = split_holdout(8, &y, 0.75, 7).unwrap();
        assert_eq!(s.train_indices.len(), 6);
        assert_eq!(s.test_indices.len(), 2);
        let train_pos = s.train_indices.iter().filter(|&&i| y[i] == 1).count();
        let test_pos = s.test_indices.iter().filter(|&&i| y[i] == 1).count();
        assert_eq!((train_pos, 6 - train_pos), (3, 3));
        assert_eq!((test_pos, 2 - test_pos), (1, 1));
        assert_eq!(s, split_holdout(8, &y, 0.75, 7).unwrap());
    }

    #[test]
    fn rejects_tiny_class_and_bad_ratio() {
        assert!(split_holdout(4, &[0, 0, 0, 1], 0.75, 1).is_err());
        assert!(split_holdout(4, &[0, 0, 1, 1], 1.0, 1).is_err());
        assert!(split_holdout(3, &[0, 0, 1, 1], 0.5, 1).is_err());
    }

    #[test]
    fn random_labels_keep_class_fraction() {
        use rand::Rng;
        let mut r = rng::seeded(99);
        let y: Vec<u8> = (0..100).map(|_| r.gen_range(0..2)).collect();
        let s = split_holdout(100, &y, 0.75, 3).unwrap();
        let global = y.iter().filter(|&&v| v == 1).count() as f64 / 100.0;
        let train = s.train_indices.iter().filter(|&&i| y[i] == 1).count() as f64
            / s.train_indices.len() as f64;
        assert!((train - global).abs() <= 0.02, "{train} vs {global}");
    }

    proptest! {
        #[test]
        fn partitions_rows(n in 4usize..300, ratio in 0.05f64..0.95, seed in any::<u64>(), label_seed in any::<u64>()) {
            use rand::Rng;
            let mut r = rng::seeded(label_seed);
            let mut y: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
            y[0] = 0; y[1] = 0; y[2] = 1; y[3] = 1;
            let s = split_holdout(n, &y, ratio, seed).unwrap();
            let mut all: Vec<usize> = s.train_indices.iter().chain(&s.test_indices).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let expected = ratio * n as f64;
            prop_assert!((s.train_indices.len() as f64 - expected).abs() <= 1.0 + 1e-9);
            for class in 0u8..=1 {
                let total = y.iter().filter(|&&v| v == class).count() as f64;
                let in_train = s.train_indices.iter().filter(|&&i| y[i] == class).count() as f64;
                prop_assert!((in_train - ratio * total).abs() <= 1.0);
            }
        }
    }
}
