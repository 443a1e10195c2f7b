//! Table → dense feature matrix: date expansion, grouped imputation,
//! categorical encoding, min-max scaling and chi-squared selection.
//!
//! Every learned step is a [`FittedTransform`]: parameters come from the
//! training rows only and `apply` never looks at anything else.

pub mod correlation;
pub mod date;
pub mod encode;
pub mod impute;
pub mod pipeline;
pub mod scale;
pub mod select;

use serde::{Deserialize, Serialize};

pub use correlation::{pearson, pearson_correlation, CorrelationReport};
pub use date::expand_date;
pub use encode::{encode_hashed, encode_onehot, fnv1a_64, EncodedColumns, HashingEncoder, OneHotEncoder};
pub use impute::{impute_group_mean, GroupImputer, GroupStats};
pub use pipeline::{check_leakage, Encoding, FittedPreprocessor, PreprocessConfig};
pub use scale::{minmax_scale, MinMaxScaler};
pub use select::{chi2_scores, select_k_best, KBestSelector};

/// A learned preprocessing step, tagged by kind for the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedTransform {
    GroupMeanImputer(GroupImputer),
    Onehot(OneHotEncoder),
    Hasher(HashingEncoder),
    Minmax(MinMaxScaler<f64>),
    Selector(KBestSelector),
}

impl FittedTransform {
    pub fn kind(&self) -> &'static str {
        match self {
            FittedTransform::GroupMeanImputer(_) => "group_mean_imputer",
            FittedTransform::Onehot(_) => "onehot",
            FittedTransform::Hasher(_) => "hasher",
            FittedTransform::Minmax(_) => "minmax",
            FittedTransform::Selector(_) => "selector",
        }
    }
}
