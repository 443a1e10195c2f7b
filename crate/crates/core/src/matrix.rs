use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major design matrix with named columns. Never holds missing values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FeatureMatrix<T: Scalar> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<T>,
    col_names: Vec<String>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<T>, col_names: Vec<String>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::invalid(format!(
                "matrix of shape {n_rows}x{n_cols} needs {} values, got {}",
                n_rows * n_cols,
                values.len()
            )));
        }
        if col_names.len() != n_cols {
            return Err(Error::invalid(format!(
                "{} column names for {n_cols} columns",
                col_names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &col_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate column name {name:?}")));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at row {}, column {}",
                pos / n_cols.max(1),
                pos % n_cols.max(1)
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
            col_names,
        })
    }

    /// Builds a matrix from rows, naming columns `x0, x1, ...`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::invalid("ragged rows"));
        }
        let values = rows.iter().flatten().copied().collect();
        let names = (0..n_cols).map(|j| format!("x{j}")).collect();
        Self::new(rows.len(), n_cols, values, names)
    }

    pub fn from_columns(columns: Vec<Vec<T>>, col_names: Vec<String>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::invalid("columns of unequal length"));
        }
        let n_cols = columns.len();
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            values.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(n_rows, n_cols, values, col_names)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact(0) panics, so zero-width matrices iterate empty rows by index
        (0..self.n_rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn take_rows(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(idx.len() * self.n_cols);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self {
            n_rows: idx.len(),
            n_cols: self.n_cols,
            values,
            col_names: self.col_names.clone(),
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for i in 0..self.n_rows {
            let row = self.row(i);
            values.extend(cols.iter().map(|&j| row[j]));
        }
        Self {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            values,
            col_names: cols.iter().map(|&j| self.col_names[j].clone()).collect(),
        }
    }

    /// Appends rows below this matrix; column layout must match.
    pub fn append_rows(&mut self, rows: &[Vec<T>]) -> Result<()> {
        for r in rows {
            if r.len() != self.n_cols {
                return Err(Error::invalid("appended row has wrong width"));
            }
            self.values.extend_from_slice(r);
        }
        self.n_rows += rows.len();
        Ok(())
    }

    pub fn map<F: Fn(usize, T) -> T>(&self, f: F) -> Self {
        let n_cols = self.n_cols.max(1);
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(k % n_cols, v))
            .collect();
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values,
            col_names: self.col_names.clone(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
            col_names: self.col_names.clone(),
        }
    }
}

/// Checks the labels-vs-matrix length contract shared by every fit routine.
pub fn check_labels<T: Scalar>(x: &FeatureMatrix<T>, y: &[u8]) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::invalid(format!(
            "labels length {} does not match {} matrix rows",
            y.len(),
            x.n_rows()
        )));
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::invalid(format!("label value {bad} is not 0/1")));
    }
    Ok(())
}
