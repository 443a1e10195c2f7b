use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Table};
use crate::error::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Output of an encoder: named numeric columns, one value per table row.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedColumns {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    /// Rows whose category was not seen at fit time.
    pub unseen: usize,
}

fn categorical_column<'a>(table: &'a Table, col: &str) -> Result<&'a crate::dataset::Column> {
    let c = table.column(col)?;
    if c.kind() != ColumnKind::Categorical {
        return Err(Error::invalid(format!("column {col:?} is not categorical")));
    }
    Ok(c)
}

/// Dummy-variable encoder: one 0/1 column per category seen at fit time
/// (sorted), optionally without a reference category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneHotEncoder {
    pub column: String,
    pub categories: Vec<String>,
    /// Reference category that gets no column of its own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop: Option<String>,
}

impl OneHotEncoder {
    pub fn fit(table: &Table, col: &str) -> Result<Self> {
        let c = categorical_column(table, col)?;
        let categories: BTreeSet<&str> = (0..table.n_rows()).filter_map(|i| c.category_at(i)).collect();
        Ok(Self {
            column: col.to_string(),
            categories: categories.into_iter().map(str::to_string).collect(),
            drop: None,
        })
    }

    /// Drops `reference` from the output columns; rows of that category encode as all zeros.
    pub fn with_drop(mut self, reference: &str) -> Self {
        if self.categories.iter().any(|c| c == reference) {
            self.drop = Some(reference.to_string());
        }
        self
    }

    fn emitted(&self) -> impl Iterator<Item = &String> {
        self.categories
            .iter()
            .filter(move |c| self.drop.as_deref() != Some(c.as_str()))
    }

    pub fn output_names(&self) -> Vec<String> {
        self.emitted().map(|c| format!("{}={}", self.column, c)).collect()
    }

    pub fn apply(&self, table: &Table) -> Result<EncodedColumns> {
        let c = categorical_column(table, &self.column)?;
        let emitted: Vec<&String> = self.emitted().collect();
        let n = table.n_rows();
        let mut columns = vec![vec![0.0; n]; emitted.len()];
        let mut unseen = 0;
        for i in 0..n {
            let Some(v) = c.category_at(i) else { continue };
            if let Some(j) = emitted.iter().position(|e| e.as_str() == v) {
                columns[j][i] = 1.0;
            } else if self.drop.as_deref() != Some(v) {
                unseen += 1;
            }
        }
        if unseen > 0 {
            log::warn!("{}: {unseen} row(s) with categories unseen at fit time", self.column);
        }
        Ok(EncodedColumns {
            names: self.output_names(),
            columns,
            unseen,
        })
    }
}

pub fn encode_onehot(table: &Table, col: &str) -> Result<OneHotEncoder> {
    OneHotEncoder::fit(table, col)
}

/// Hashing-trick encoder: category `s` lands at `h(s) mod width` with
/// sign from bit 32 of `h(s)`, `h` being FNV-1a over the UTF-8 bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashingEncoder {
    pub column: String,
    pub width: usize,
    pub signed: bool,
}

impl HashingEncoder {
    pub fn new(col: &str, width: usize, signed: bool) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid("hash width must be at least 1"));
        }
        Ok(Self {
            column: col.to_string(),
            width,
            signed,
        })
    }

    /// (index, sign) for one category string.
    pub fn slot(&self, category: &str) -> (usize, f64) {
        let h = fnv1a_64(category.as_bytes());
        let index = (h % self.width as u64) as usize;
        let sign = if !self.signed || (h >> 32) & 1 == 0 { 1.0 } else { -1.0 };
        (index, sign)
    }

    pub fn output_names(&self) -> Vec<String> {
        (0..self.width).map(|j| format!("{}#h{j}", self.column)).collect()
    }

    pub fn apply(&self, table: &Table) -> Result<EncodedColumns> {
        let c = categorical_column(table, &self.column)?;
        let n = table.n_rows();
        let mut columns = vec![vec![0.0; n]; self.width];
        for i in 0..n {
            if let Some(v) = c.category_at(i) {
                let (j, s) = self.slot(v);
                columns[j][i] = s;
            }
        }
        Ok(EncodedColumns {
            names: self.output_names(),
            columns,
            unseen: 0,
        })
    }
}

pub fn encode_hashed(table: &Table, col: &str, m: usize) -> Result<HashingEncoder> {
    categorical_column(table, col)?;
    HashingEncoder::new(col, m, true)
}
