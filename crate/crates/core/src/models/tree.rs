//! Binary decision trees over numeric features.
//!
//! One builder serves every tree in the crate: weighted Gini for
//! classification (plain CART, forest members, AdaBoost stumps) and
//! squared error for the gradient-boosting regression trees. Nodes live in
//! a flat arena so deep trees never recurse.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_labels, FeatureMatrix};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", bound = "")]
pub enum Node<T: Scalar> {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
    Leaf { value: T, n_samples: usize },
}

/// Arena tree; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Tree<T: Scalar> {
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    pub fn leaf(value: T, n_samples: usize) -> Self {
        Self {
            nodes: vec![Node::Leaf { value, n_samples }],
        }
    }

    pub fn leaf_index(&self, row: &[T]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
                Node::Leaf { .. } => return at,
            }
        }
    }

    pub fn value(&self, row: &[T]) -> T {
        match &self.nodes[self.leaf_index(row)] {
            Node::Leaf { value, .. } => *value,
            Node::Split { .. } => unreachable!("leaf_index stops at leaves"),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, d)) = stack.pop() {
            match &self.nodes[id] {
                Node::Split { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
                Node::Leaf { .. } => best = best.max(d),
            }
        }
        best
    }

    /// (feature, threshold) of the root split, if any.
    pub fn root_split(&self) -> Option<(usize, T)> {
        match &self.nodes[0] {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Criterion {
    /// Targets must be 0/1; impurity 2p(1-p).
    Gini,
    SquaredError,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Features drawn per split; `None` searches all of them.
    pub max_features: Option<usize>,
}

#[derive(Clone, Copy)]
struct Stats<T> {
    w: T,
    s: T,
    q: T,
}

impl<T: Scalar> Stats<T> {
    fn zero() -> Self {
        Self { w: T::zero(), s: T::zero(), q: T::zero() }
    }

    fn add(&mut self, t: T, w: T) {
        self.w += w;
        self.s += w * t;
        self.q += w * t * t;
    }

    fn minus(&self, o: &Self) -> Self {
        Self { w: self.w - o.w, s: self.s - o.s, q: self.q - o.q }
    }

    /// Impurity times total weight.
    fn total_impurity(&self, c: Criterion) -> T {
        if self.w <= T::zero() {
            return T::zero();
        }
        match c {
            Criterion::Gini => {
                let two = T::lit(2.0);
                (two * self.s * (self.w - self.s) / self.w).max(T::zero())
            }
            Criterion::SquaredError => (self.q - self.s * self.s / self.w).max(T::zero()),
        }
    }
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    gain: T,
}

/// Grows a tree on `rows` (duplicates allowed, e.g. a bootstrap sample).
/// `leaf_value` turns the rows reaching a leaf into its stored value.
#[allow(clippy::too_many_arguments)]
pub(crate) fn grow<T: Scalar, F>(
    x: &FeatureMatrix<T>,
    targets: &[T],
    weights: &[T],
    rows: Vec<usize>,
    criterion: Criterion,
    params: GrowParams,
    mut rng: Option<&mut Rng>,
    leaf_value: F,
) -> Tree<T>
where
    F: Fn(&[usize]) -> T,
{
    let d = x.n_cols();
    let mut nodes: Vec<Node<T>> = vec![Node::Leaf { value: T::zero(), n_samples: 0 }];
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(0, rows, 0)];
    let rel_tol = T::epsilon() * T::lit(64.0);

    while let Some((id, node_rows, depth)) = stack.pop() {
        let t0 = node_rows.first().map(|&i| targets[i]);
        let pure = node_rows.iter().all(|&i| Some(targets[i]) == t0);
        let stop = pure
            || node_rows.len() < params.min_samples_split.max(2)
            || params.max_depth.is_some_and(|m| depth >= m);
        let best = if stop {
            None
        } else {
            let features: Vec<usize> = match (params.max_features, rng.as_deref_mut()) {
                (Some(m), Some(r)) if m < d => {
                    let mut f = sample(r, d, m).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => (0..d).collect(),
            };
            best_split(x, targets, weights, &node_rows, &features, criterion, rel_tol)
        };
        match best {
            None => {
                nodes[id] = Node::Leaf { value: leaf_value(&node_rows), n_samples: node_rows.len() };
            }
            Some(b) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                    node_rows.iter().partition(|&&i| x.get(i, b.feature) <= b.threshold);
                let left = nodes.len();
                nodes.push(Node::Leaf { value: T::zero(), n_samples: 0 });
                let right = nodes.len();
                nodes.push(Node::Leaf { value: T::zero(), n_samples: 0 });
                nodes[id] = Node::Split { feature: b.feature, threshold: b.threshold, left, right };
                // right first so the left subtree is numbered first
                stack.push((right, right_rows, depth + 1));
                stack.push((left, left_rows, depth + 1));
            }
        }
    }
    Tree { nodes }
}

/// Exhaustive search over `features` × midpoints of consecutive distinct
/// values. Ties go to the lower feature, then the lower threshold.
fn best_split<T: Scalar>(
    x: &FeatureMatrix<T>,
    targets: &[T],
    weights: &[T],
    rows: &[usize],
    features: &[usize],
    criterion: Criterion,
    rel_tol: T,
) -> Option<BestSplit<T>> {
    let mut parent = Stats::zero();
    for &i in rows {
        parent.add(targets[i], weights[i]);
    }
    let parent_imp = parent.total_impurity(criterion);
    if parent_imp <= T::zero() || parent.w <= T::zero() {
        return None;
    }
    let min_gain = parent_imp * rel_tol;
    let mut best: Option<BestSplit<T>> = None;
    let mut sorted: Vec<(T, usize)> = Vec::with_capacity(rows.len());
    for &f in features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&i| (x.get(i, f), i)));
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
        let mut left = Stats::zero();
        for k in 0..sorted.len() - 1 {
            let (v, i) = sorted[k];
            left.add(targets[i], weights[i]);
            let next = sorted[k + 1].0;
            if next <= v {
                continue;
            }
            let right = parent.minus(&left);
            let mut decrease = parent_imp - left.total_impurity(criterion) - right.total_impurity(criterion);
            if decrease <= min_gain {
                // rounding noise; a zero-gain split is still a split (XOR needs one at the root)
                decrease = T::zero();
            }
            let gain = decrease / parent.w;
            let better = match &best {
                None => true,
                Some(b) => gain > b.gain + b.gain.abs() * rel_tol,
            };
            if better {
                let mut threshold = (v + next) * T::half();
                if threshold >= next {
                    threshold = v;
                }
                best = Some(BestSplit { feature: f, threshold, gain });
            }
        }
    }
    best
}

/// Weighted class-1 fraction of the rows.
pub(crate) fn class_fraction<T: Scalar>(targets: &[T], weights: &[T], rows: &[usize]) -> T {
    let (mut w, mut s) = (T::zero(), T::zero());
    for &i in rows {
        w += weights[i];
        s += weights[i] * targets[i];
    }
    if w > T::zero() {
        (s / w).max(T::zero()).min(T::one())
    } else {
        T::zero()
    }
}

pub(crate) fn labels_as<T: Scalar>(y: &[u8]) -> Vec<T> {
    y.iter().map(|&v| if v == 1 { T::one() } else { T::zero() }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self { max_depth: None, min_samples_split: 2 }
    }
}

/// CART classification tree; leaves hold the class-1 fraction. A node
/// becomes a leaf at `max_depth`, below `min_samples_split`, when pure, or
/// when every feature is constant on its rows. The best split may have zero
/// Gini decrease.
pub fn fit_tree<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8], params: &TreeParams) -> Result<Tree<T>> {
    check_labels(x, y)?;
    if x.n_rows() == 0 {
        return Err(Error::fit("cannot fit a tree on zero rows"));
    }
    let targets = labels_as::<T>(y);
    let weights = vec![T::one(); y.len()];
    Ok(grow(
        x,
        &targets,
        &weights,
        (0..y.len()).collect(),
        Criterion::Gini,
        GrowParams { max_depth: params.max_depth, min_samples_split: params.min_samples_split, max_features: None },
        None,
        |rows| class_fraction(&targets, &weights, rows),
    ))
}
