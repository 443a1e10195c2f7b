//! Seven binary classifiers behind one contract.
//!
//! A [`ClassifierSpec`] holds the kind and its hyperparameters, `fit` turns
//! it into a [`Model`], and every model exposes `score` (probability of
//! class 1) and `predict`. Both specs and fitted models serialize to JSON
//! with a `"kind"` tag.

pub mod adaboost;
pub mod decision_table;
pub mod forest;
pub mod gbm;
pub mod knn;
pub mod logreg;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;
use crate::scalar::Scalar;

pub use adaboost::{fit_adaboost, AdaBoostModel, AdaBoostParams};
pub use decision_table::{fit_decision_table, DecisionTableModel, DecisionTableParams};
pub use forest::{fit_random_forest, RandomForestModel, RandomForestParams};
pub use gbm::{fit_gbm, GbmModel, GbmParams};
pub use knn::{fit_knn, KnnModel, KnnParams};
pub use logreg::{fit_logreg, LogregModel, LogregParams};
pub use tree::{fit_tree, Node, Tree, TreeParams};

/// Number of candidate features drawn at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Count(n) => n.min(n_features),
        }
        .max(1)
    }
}

pub trait Classifier<T: Scalar>: Send + Sync {
    /// Probability of class 1 per row.
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>>;

    fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<u8>> {
        Ok(self.score(x)?.into_iter().map(|s| u8::from(s >= T::half())).collect())
    }
}

pub(crate) fn check_width<T: Scalar>(x: &FeatureMatrix<T>, expected: usize) -> Result<()> {
    if x.n_cols() != expected {
        return Err(Error::invalid(format!(
            "model was fitted on {expected} features, got {}",
            x.n_cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Logreg(LogregParams),
    Tree(TreeParams),
    Knn(KnnParams),
    DecisionTable(DecisionTableParams),
    RandomForest(RandomForestParams),
    Adaboost(AdaBoostParams),
    Gbm(GbmParams),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 1")))
    }
}

fn depth(v: Option<usize>) -> Result<()> {
    v.map_or(Ok(()), |d| at_least_one("max_depth", d))
}

fn max_features(m: MaxFeatures) -> Result<()> {
    match m {
        MaxFeatures::Count(n) => at_least_one("max_features", n),
        _ => Ok(()),
    }
}

impl ClassifierSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassifierSpec::Logreg(_) => "logreg",
            ClassifierSpec::Tree(_) => "tree",
            ClassifierSpec::Knn(_) => "knn",
            ClassifierSpec::DecisionTable(_) => "decision_table",
            ClassifierSpec::RandomForest(_) => "random_forest",
            ClassifierSpec::Adaboost(_) => "adaboost",
            ClassifierSpec::Gbm(_) => "gbm",
        }
    }

    /// Display name; distinguishes the hyperparameters that vary across a roster.
    pub fn label(&self) -> String {
        match self {
            ClassifierSpec::Knn(p) => format!("knn_k{}", p.k),
            ClassifierSpec::Gbm(p) => format!("gbm_lr{}", p.learning_rate),
            ClassifierSpec::Tree(p) => match p.max_depth {
                Some(d) => format!("tree_d{d}"),
                None => "tree".into(),
            },
            other => other.kind().into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierSpec::Logreg(p) => {
                positive("learning_rate", p.learning_rate)?;
                if !(p.l2.is_finite() && p.l2 >= 0.0) {
                    return Err(Error::Config(format!("l2 must be >= 0, got {}", p.l2)));
                }
                Ok(())
            }
            ClassifierSpec::Tree(p) => {
                depth(p.max_depth)?;
                at_least_one("min_samples_split", p.min_samples_split)
            }
            ClassifierSpec::Knn(p) => {
                at_least_one("k", p.k)?;
                if p.k % 2 == 0 {
                    return Err(Error::Config(format!("knn k must be odd, got {}", p.k)));
                }
                Ok(())
            }
            ClassifierSpec::DecisionTable(p) => {
                if p.n_bins < 2 {
                    return Err(Error::Config(format!("n_bins must be >= 2, got {}", p.n_bins)));
                }
                if p.cv_folds < 2 {
                    return Err(Error::Config(format!("cv_folds must be >= 2, got {}", p.cv_folds)));
                }
                Ok(())
            }
            ClassifierSpec::RandomForest(p) => {
                at_least_one("n_estimators", p.n_estimators)?;
                depth(p.max_depth)?;
                max_features(p.max_features)
            }
            ClassifierSpec::Adaboost(p) => at_least_one("n_estimators", p.n_estimators),
            ClassifierSpec::Gbm(p) => {
                positive("learning_rate", p.learning_rate)?;
                at_least_one("max_depth", p.max_depth)?;
                max_features(p.max_features)
            }
        }
    }

    /// Same spec with its seed replaced; kinds without randomness are unchanged.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        match &mut s {
            ClassifierSpec::DecisionTable(p) => p.seed = seed,
            ClassifierSpec::RandomForest(p) => p.seed = seed,
            ClassifierSpec::Gbm(p) => p.seed = seed,
            _ => {}
        }
        s
    }

    pub fn fit<T: Scalar>(&self, x: &FeatureMatrix<T>, y: &[u8]) -> Result<Model<T>> {
        self.validate()?;
        Ok(match self {
            ClassifierSpec::Logreg(p) => Model::Logreg(fit_logreg(x, y, p)?),
            ClassifierSpec::Tree(p) => Model::Tree(fit_tree(x, y, p)?),
            ClassifierSpec::Knn(p) => Model::Knn(fit_knn(x, y, p)?),
            ClassifierSpec::DecisionTable(p) => Model::DecisionTable(fit_decision_table(x, y, p)?),
            ClassifierSpec::RandomForest(p) => Model::RandomForest(fit_random_forest(x, y, p)?),
            ClassifierSpec::Adaboost(p) => Model::Adaboost(fit_adaboost(x, y, p)?),
            ClassifierSpec::Gbm(p) => Model::Gbm(fit_gbm(x, y, p)?),
        })
    }
}

/// A fitted classifier of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum Model<T: Scalar> {
    Logreg(LogregModel<T>),
    Tree(Tree<T>),
    Knn(KnnModel<T>),
    DecisionTable(DecisionTableModel<T>),
    RandomForest(RandomForestModel<T>),
    Adaboost(AdaBoostModel<T>),
    Gbm(GbmModel<T>),
}

/// Tree as a standalone classifier: the leaf stores the class-1 fraction.
impl<T: Scalar> Classifier<T> for Tree<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        Ok(x.rows().map(|r| self.value(r)).collect())
    }
}

impl<T: Scalar> Classifier<T> for Model<T> {
    fn score(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        match self {
            Model::Logreg(m) => m.score(x),
            Model::Tree(m) => m.score(x),
            Model::Knn(m) => m.score(x),
            Model::DecisionTable(m) => m.score(x),
            Model::RandomForest(m) => m.score(x),
            Model::Adaboost(m) => m.score(x),
            Model::Gbm(m) => m.score(x),
        }
    }

    fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<u8>> {
        match self {
            Model::Logreg(m) => m.predict(x),
            Model::Tree(m) => m.predict(x),
            Model::Knn(m) => m.predict(x),
            Model::DecisionTable(m) => m.predict(x),
            Model::RandomForest(m) => m.predict(x),
            Model::Adaboost(m) => m.predict(x),
            Model::Gbm(m) => m.predict(x),
        }
    }
}

impl<T: Scalar> Model<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Logreg(_) => "logreg",
            Model::Tree(_) => "tree",
            Model::Knn(_) => "knn",
            Model::DecisionTable(_) => "decision_table",
            Model::RandomForest(_) => "random_forest",
            Model::Adaboost(_) => "adaboost",
            Model::Gbm(_) => "gbm",
        }
    }
}
