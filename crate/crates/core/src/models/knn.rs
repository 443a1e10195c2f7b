use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_width, Classifier};
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::scalar::{sq_dist, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 25 }
    }
}

/// Lazy learner: keeps the training rows and votes at query time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KnnModel<T: Scalar> {
    pub k: usize,
    pub x: FeatureMatrix<T>,
    pub y: Vec<u8>,
}

pub fn fit_knn<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], params: &KnnParams) -> Result<KnnModel<T>> {
    check_labels(x, y)?;
    if params.k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if params.k > x.n_rows() {
        return Err(Error::invalid(format!("k = {} exceeds the {} training rows", params.k, x.n_rows())));
    }
    Ok(KnnModel { k: params.k, x: x.clone(), y: y.to_vec() })
}

impl<T: Scalar> KnnModel<T> {
    /// The k nearest training rows as (squared distance, index), nearest
    /// first; equal distances keep the lower index.
    pub fn neighbors(&self, q: &[T]) -> Vec<(T, usize)> {
        let mut best: Vec<(T, usize)> = Vec::with_capacity(self.k + 1);
        for (i, row) in self.x.rows().enumerate() {
            let d = sq_dist(q, row);
            if best.len() == self.k && d >= best[self.k - 1].0 {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(pos, (d, i));
            best.truncate(self.k);
        }
        best
    }

    /// Vote for one query: (class-1 fraction, predicted label).
    fn vote(&self, q: &[T]) -> (T, u8) {
        let nb = self.neighbors(q);
        let ones = nb.iter().filter(|&&(_, i)| self.y[i] == 1).count();
        let frac = T::from_usize_lossy(ones) / T::from_usize_lossy(nb.len());
        let label = if 2 * ones > nb.len() {
            1
        } else if 2 * ones < nb.len() {
            0
        } else {
            let (mut d1, mut d0) = (T::zero(), T::zero());
            for &(d, i) in &nb {
                if self.y[i] == 1 {
                    d1 += d.sqrt();
                } else {
                    d0 += d.sqrt();
                }
            }
            u8::from(d1 <= d0)
        };
        (frac, label)
    }
}

impl<T: Scalar> Classifier<T> for KnnModel<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        check_width(x, self.x.n_cols())?;
        let rows: Vec<&[T]> = x.rows().collect();
        Ok(rows.par_iter().map(|q| self.vote(q).0).collect())
    }

    /// Majority vote; an exact half split goes to the class whose members
    /// are cumulatively nearer (class 1 if equal).
    fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<u8>> {
        check_width(x, self.x.n_cols())?;
        let rows: Vec<&[T]> = x.rows().collect();
        Ok(rows.par_iter().map(|q| self.vote(q).1).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn k_equal_to_n_gives_global_fraction() {
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        let y = [1, 0, 0, 1, 1];
        let m = fit_knn(&x, &y, &KnnParams { k: 5 }).unwrap();
        let q = FeatureMatrix::from_rows(&[vec![-10.0], vec![2.5], vec![99.0]]).unwrap();
        assert!(m.score(&q).unwrap().iter().all(|&s| s == 0.6));
    }

    #[test]
    fn coincident_query_with_k_one() {
        let x = FeatureMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let m = fit_knn(&x, &[0, 1], &KnnParams { k: 1 }).unwrap();
        assert_eq!(m.predict(&x).unwrap(), vec![0, 1]);
    }

    #[test]
    fn k_larger_than_rows_is_an_error() {
        let x = FeatureMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(fit_knn(&x, &[0], &KnnParams { k: 3 }).is_err());
    }

    #[test]
    fn even_k_tie_goes_to_cumulatively_nearer_class() {
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![3.0], vec![10.0]]).unwrap();
        let m = fit_knn(&x, &[1, 0, 0], &KnnParams { k: 2 }).unwrap();
        // neighbours of 1.0: row 0 (class 1, d=1) and row 1 (class 0, d=2)
        let q = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(m.score(&q).unwrap(), vec![0.5, 0.5]);
        assert_eq!(m.predict(&q).unwrap(), vec![1, 0]);
    }

    #[test]
    fn equal_distances_prefer_lower_index() {
        let x = FeatureMatrix::from_rows(&[vec![1.0], vec![-1.0], vec![1.0]]).unwrap();
        let m = fit_knn(&x, &[0, 1, 1], &KnnParams { k: 1 }).unwrap();
        assert_eq!(m.neighbors(&[0.0]), vec![(1.0, 0)]);
    }

    #[test]
    fn matches_full_sort_oracle() {
        let mut r = crate::rng::seeded(200);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..3).map(|_| r.gen::<f64>()).collect()).collect();
        let y: Vec<u8> = (0..200).map(|_| r.gen_range(0..2)).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let m = fit_knn(&x, &y, &KnnParams { k: 25 }).unwrap();
        let queries: Vec<Vec<f64>> = (0..50).map(|_| (0..3).map(|_| r.gen::<f64>()).collect()).collect();
        let q = FeatureMatrix::from_rows(&queries).unwrap();
        let got = m.predict(&q).unwrap();
        for (qi, query) in queries.iter().enumerate() {
            let mut all: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .map(|(i, row)| (row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
                .collect();
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ones = all[..25].iter().filter(|(_, i)| y[*i] == 1).count();
            assert_eq!(got[qi], u8::from(ones >= 13), "query {qi}");
        }
    }
}
