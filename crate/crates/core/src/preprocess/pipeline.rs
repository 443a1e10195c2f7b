use serde::{Deserialize, Serialize};

use super::encode::{EncodedColumns, HashingEncoder, OneHotEncoder};
use super::impute::GroupImputer;
use super::scale::MinMaxScaler;
use super::select::{select_k_best, KBestSelector};
use super::{expand_date, FittedTransform};
use crate::dataset::{ColumnKind, Table, LEAKY_COLUMN};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Hashed,
    Onehot,
}

fn default_group_cols() -> Vec<String> {
    vec!["Location".into(), "Month".into()]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub encoding: Encoding,
    pub hash_width: usize,
    #[serde(default = "default_true")]
    pub signed_hash: bool,
    pub selector_k: usize,
    /// Input columns allowed into the matrix; `None` means every non-target
    /// column. `Date` stands for its Year/Month/Day expansion.
    #[serde(default)]
    pub features: Option<Vec<String>>,
    #[serde(default = "default_group_cols")]
    pub group_cols: Vec<String>,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            encoding: Encoding::Hashed,
            hash_width: 8,
            signed_hash: true,
            selector_k: 4,
            features: None,
            group_cols: default_group_cols(),
        }
    }
}

/// Rejects feature lists that name the leaky column.
pub fn check_leakage(features: Option<&[String]>) -> Result<()> {
    if let Some(f) = features {
        if f.iter().any(|c| c == LEAKY_COLUMN) {
            return Err(Error::Leakage(format!(
                "{LEAKY_COLUMN} is the next-day rain amount the target is derived from; it cannot be a feature"
            )));
        }
    }
    Ok(())
}

/// The learned preprocessing chain: imputers, encoders, scaler, selector.
/// Applying it to the rows it was fitted on reproduces the fit-time matrix
/// bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPreprocessor {
    /// Table columns (after date expansion) feeding the matrix, in order.
    pub feature_columns: Vec<String>,
    pub steps: Vec<FittedTransform>,
}

/// Leaky column removed and the date expanded.
fn base_table(table: &Table) -> Result<Table> {
    let t = if table.has_column(LEAKY_COLUMN) {
        table.drop_columns(&[LEAKY_COLUMN])?
    } else {
        table.clone()
    };
    if t.columns().iter().any(|c| c.kind() == ColumnKind::Date) {
        expand_date(&t)
    } else {
        Ok(t)
    }
}

fn is_yes_no(enc: &OneHotEncoder) -> bool {
    enc.categories.iter().any(|c| c == "Yes") && enc.categories.iter().all(|c| c == "Yes" || c == "No")
}

impl FittedPreprocessor {
    /// Fits every step on `train` and returns the selected training matrix.
    pub fn fit(train: &Table, labels: &[u8], cfg: &PreprocessConfig) -> Result<(Self, FeatureMatrix<f64>)> {
        check_leakage(cfg.features.as_deref())?;
        let mut table = base_table(train)?;
        for g in &cfg.group_cols {
            if !table.has_column(g) {
                return Err(Error::Config(format!("grouping column {g:?} not in table")));
            }
        }
        let feature_columns: Vec<String> = match &cfg.features {
            Some(list) => {
                let mut out = Vec::new();
                for name in list {
                    let expanded: Vec<&str> = if name == "Date" {
                        vec!["Year", "Month", "Day"]
                    } else {
                        vec![name.as_str()]
                    };
                    for e in expanded {
                        let c = table
                            .column(e)
                            .map_err(|_| Error::Config(format!("feature column {e:?} not in table")))?;
                        if c.kind() == ColumnKind::BinaryLabel {
                            return Err(Error::Config(format!("target {e:?} cannot be a feature")));
                        }
                        out.push(e.to_string());
                    }
                }
                out
            }
            None => table
                .columns()
                .iter()
                .filter(|c| c.kind() != ColumnKind::BinaryLabel)
                .map(|c| c.name().to_string())
                .collect(),
        };
        if feature_columns.is_empty() {
            return Err(Error::Config("no feature columns".into()));
        }

        let group_refs: Vec<&str> = cfg.group_cols.iter().map(String::as_str).collect();
        let mut steps = Vec::new();
        for name in &feature_columns {
            let imputer = GroupImputer::fit(&table, name, &group_refs)?;
            table = imputer.apply(&table)?;
            steps.push(FittedTransform::GroupMeanImputer(imputer));
        }
        for name in &feature_columns {
            let col = table.column(name)?;
            if col.kind() != ColumnKind::Categorical {
                continue;
            }
            let onehot = OneHotEncoder::fit(&table, name)?;
            let step = if is_yes_no(&onehot) {
                FittedTransform::Onehot(onehot.with_drop("No"))
            } else {
                match cfg.encoding {
                    Encoding::Onehot => FittedTransform::Onehot(onehot),
                    Encoding::Hashed => {
                        FittedTransform::Hasher(HashingEncoder::new(name, cfg.hash_width, cfg.signed_hash)?)
                    }
                }
            };
            steps.push(step);
        }
        let mut fitted = Self {
            feature_columns,
            steps,
        };
        let raw = fitted.assemble(&table)?;
        let scaler = MinMaxScaler::fit(&raw);
        let scaled = scaler.apply(&raw)?;
        let k = cfg.selector_k;
        if k == 0 || k > scaled.n_cols() {
            return Err(Error::Config(format!(
                "selector_k = {k} outside 1..={} encoded columns",
                scaled.n_cols()
            )));
        }
        let selector = select_k_best(&scaled, labels, k)?;
        let selected = selector.apply(&scaled)?;
        fitted.steps.push(FittedTransform::Minmax(scaler));
        fitted.steps.push(FittedTransform::Selector(selector));
        Ok((fitted, selected))
    }

    /// Builds the unscaled numeric matrix from an imputed table.
    fn assemble(&self, table: &Table) -> Result<FeatureMatrix<f64>> {
        let mut names = Vec::new();
        let mut columns = Vec::new();
        for name in &self.feature_columns {
            let col = table.column(name)?;
            match col.kind() {
                ColumnKind::Numeric => {
                    let values: Option<Vec<f64>> = (0..table.n_rows()).map(|i| col.numeric_at(i)).collect();
                    let values = values.ok_or_else(|| {
                        Error::invalid(format!("column {name:?} still has missing values"))
                    })?;
                    names.push(name.clone());
                    columns.push(values);
                }
                ColumnKind::Categorical => {
                    let enc: EncodedColumns = self
                        .steps
                        .iter()
                        .find_map(|s| match s {
                            FittedTransform::Onehot(e) if &e.column == name => Some(e.apply(table)),
                            FittedTransform::Hasher(e) if &e.column == name => Some(e.apply(table)),
                            _ => None,
                        })
                        .ok_or_else(|| Error::invalid(format!("no encoder fitted for {name:?}")))??;
                    names.extend(enc.names);
                    columns.extend(enc.columns);
                }
                other => {
                    return Err(Error::invalid(format!("column {name:?} of kind {other:?} cannot be a feature")))
                }
            }
        }
        if columns.is_empty() {
            return FeatureMatrix::new(table.n_rows(), 0, Vec::new(), Vec::new());
        }
        FeatureMatrix::from_columns(columns, names)
    }

    pub fn scaler(&self) -> Option<&MinMaxScaler<f64>> {
        self.steps.iter().find_map(|s| match s {
            FittedTransform::Minmax(m) => Some(m),
            _ => None,
        })
    }

    pub fn selector(&self) -> Option<&KBestSelector> {
        self.steps.iter().find_map(|s| match s {
            FittedTransform::Selector(m) => Some(m),
            _ => None,
        })
    }

    /// Imputed, encoded and scaled matrix before selection.
    pub fn transform_unselected(&self, table: &Table) -> Result<FeatureMatrix<f64>> {
        let mut t = base_table(table)?;
        for s in &self.steps {
            if let FittedTransform::GroupMeanImputer(imp) = s {
                t = imp.apply(&t)?;
            }
        }
        let raw = self.assemble(&t)?;
        match self.scaler() {
            Some(s) => s.apply(&raw),
            None => Ok(raw),
        }
    }

    pub fn apply(&self, table: &Table) -> Result<FeatureMatrix<f64>> {
        let scaled = self.transform_unselected(table)?;
        match self.selector() {
            Some(s) => s.apply(&scaled),
            None => Ok(scaled),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
