//! Class rebalancing of a training set: majority undersampling (uniform or
//! distance-based) and SMOTE oversampling of the minority class.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::LabelVector;
use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::rng;
use crate::scalar::{sq_dist, Scalar};

/// Minority neighbours averaged over by the distance undersampler.
const DISTANCE_NEIGHBORS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMode {
    None,
    UndersampleRandom,
    UndersampleDistance,
    Smote,
}

fn default_k() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplePlan {
    pub mode: ResampleMode,
    #[serde(default = "default_k")]
    pub k_neighbors: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ResamplePlan {
    pub fn none() -> Self {
        Self { mode: ResampleMode::None, k_neighbors: default_k(), seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == ResampleMode::Smote && self.k_neighbors == 0 {
            return Err(Error::Config("SMOTE needs k_neighbors >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

struct Classes {
    minority: u8,
    minority_rows: Vec<usize>,
    majority_rows: Vec<usize>,
}

fn split_classes(y: &[u8]) -> Result<Classes> {
    let pos: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 1).collect();
    let neg: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 0).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::invalid("resampling needs both classes present"));
    }
    // on a tie class 1 counts as minority; callers short-circuit balanced input anyway
    Ok(if pos.len() <= neg.len() {
        Classes { minority: 1, minority_rows: pos, majority_rows: neg }
    } else {
        Classes { minority: 0, minority_rows: neg, majority_rows: pos }
    })
}

fn relabel(y: &[u8], like: &LabelVector) -> LabelVector {
    LabelVector::new(y.to_vec(), like.positive_meaning())
}

/// Keeps every minority row plus `n_minority` majority rows, in original row order.
pub fn undersample<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &LabelVector,
    plan: &ResamplePlan,
) -> Result<(FeatureMatrix<T>, LabelVector)> {
    check_labels(x, y)?;
    let classes = split_classes(y)?;
    let n_keep = classes.minority_rows.len();
    let kept_majority: Vec<usize> = match plan.mode {
        ResampleMode::UndersampleRandom => {
            let mut m = classes.majority_rows.clone();
            m.shuffle(&mut rng::seeded(plan.seed));
            m.truncate(n_keep);
            m
        }
        ResampleMode::UndersampleDistance => {
            let scores = majority_boundary_distance(x, &classes);
            let mut order: Vec<usize> = (0..classes.majority_rows.len()).collect();
            order.sort_by(|&a, &b| {
                scores[b]
                    .partial_cmp(&scores[a])
                    .expect("finite distances")
                    .then(classes.majority_rows[a].cmp(&classes.majority_rows[b]))
            });
            order.into_iter().take(n_keep).map(|k| classes.majority_rows[k]).collect()
        }
        other => return Err(Error::Config(format!("undersample called with mode {other:?}"))),
    };
    let mut keep = vec![false; x.n_rows()];
    for &i in classes.minority_rows.iter().chain(&kept_majority) {
        keep[i] = true;
    }
    let idx: Vec<usize> = (0..x.n_rows()).filter(|&i| keep[i]).collect();
    Ok((x.take_rows(&idx), y.take(&idx)))
}

/// Mean Euclidean distance of each majority row to its nearest minority rows.
fn majority_boundary_distance<T: Scalar>(x: &FeatureMatrix<T>, classes: &Classes) -> Vec<T> {
    let k = DISTANCE_NEIGHBORS.min(classes.minority_rows.len());
    classes
        .majority_rows
        .par_iter()
        .map(|&i| {
            let mut d: Vec<T> = classes
                .minority_rows
                .iter()
                .map(|&m| sq_dist(x.row(i), x.row(m)))
                .collect();
            d.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("finite"));
            let mut nearest = d[..k].to_vec();
            nearest.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            nearest.iter().map(|v| v.sqrt()).sum::<T>() / T::from_usize_lossy(k)
        })
        .collect()
}

/// Indices (into `pool`) of the `k` rows nearest to `pool[q]`, excluding
/// `q` itself; distance ties go to the lower pool position.
pub fn nearest_in_pool<T: Scalar>(x: &FeatureMatrix<T>, pool: &[usize], q: usize, k: usize) -> Vec<usize> {
    let query = x.row(pool[q]);
    let mut cand: Vec<(T, usize)> = pool
        .iter()
        .enumerate()
        .filter(|&(p, _)| p != q)
        .map(|(p, &row)| (sq_dist(query, x.row(row)), p))
        .collect();
    let cmp = |a: &(T, usize), b: &(T, usize)| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    cand.into_iter().map(|(_, p)| p).collect()
}

/// Synthetic row generated by [`smote`], with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticOrigin {
    /// Row index (in the input matrix) of the seed sample.
    pub base: usize,
    /// Row index of the neighbour it was interpolated towards.
    pub neighbor: usize,
    pub gap: f64,
}

/// SMOTE. Returns the input rows verbatim followed by synthetic minority
/// rows until both classes have the majority count.
pub fn smote<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &LabelVector,
    plan: &ResamplePlan,
) -> Result<(FeatureMatrix<T>, LabelVector)> {
    smote_with_origins(x, y, plan).map(|(x, y, _)| (x, y))
}

pub fn smote_with_origins<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &LabelVector,
    plan: &ResamplePlan,
) -> Result<(FeatureMatrix<T>, LabelVector, Vec<SyntheticOrigin>)> {
    check_labels(x, y)?;
    plan.validate()?;
    let classes = split_classes(y)?;
    let k = plan.k_neighbors;
    let m = classes.minority_rows.len();
    if m <= k {
        return Err(Error::invalid(format!(
            "SMOTE needs more minority rows ({m}) than k_neighbors ({k}); lower k_neighbors"
        )));
    }
    let needed = classes.majority_rows.len() - m;
    let pool = &classes.minority_rows;

    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng::seeded(plan.seed));
    let used = &order[..needed.min(m)];
    let neighbors: Vec<Vec<usize>> = used.par_iter().map(|&q| nearest_in_pool(x, pool, q, k)).collect();

    let d = x.n_cols();
    let synthetic: Vec<(Vec<T>, SyntheticOrigin)> = (0..needed)
        .into_par_iter()
        .map(|j| {
            let slot = j % m;
            let base = pool[order[slot]];
            let mut r = rng::stream(plan.seed, j as u64);
            let z = pool[neighbors[slot][r.gen_range(0..k)]];
            let gap: f64 = r.gen();
            let u = T::lit(gap);
            let (xb, xz) = (x.row(base), x.row(z));
            let row = (0..d)
                .map(|c| {
                    let v = xb[c] + u * (xz[c] - xb[c]);
                    v.max(xb[c].min(xz[c])).min(xb[c].max(xz[c]))
                })
                .collect();
            (row, SyntheticOrigin { base, neighbor: z, gap })
        })
        .collect();

    let mut out = x.clone();
    let (rows, origins): (Vec<Vec<T>>, Vec<SyntheticOrigin>) = synthetic.into_iter().unzip();
    out.append_rows(&rows)?;
    let mut labels = y.to_vec();
    labels.extend(std::iter::repeat_n(classes.minority, needed));
    Ok((out, relabel(&labels, y), origins))
}

/// Dispatches on `plan.mode`; `None` returns the input unchanged.
pub fn resample<T: Scalar>(
    x: &FeatureMatrix<T>,
    y: &LabelVector,
    plan: &ResamplePlan,
) -> Result<(FeatureMatrix<T>, LabelVector)> {
    match plan.mode {
        ResampleMode::None => Ok((x.clone(), y.clone())),
        ResampleMode::UndersampleRandom | ResampleMode::UndersampleDistance => undersample(x, y, plan),
        ResampleMode::Smote => smote(x, y, plan),
    }
}
