use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{Column, ColumnKind, Table};
use crate::error::{Error, Result};

const KEY_SEP: char = '\u{1f}';

/// Learned fill values, keyed by the joined group-column values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fill", rename_all = "snake_case")]
pub enum GroupStats {
    Mean {
        groups: BTreeMap<String, f64>,
        global: f64,
    },
    Mode {
        groups: BTreeMap<String, String>,
        global: String,
    },
}

/// Fills missing cells of one column from per-group statistics, falling
/// back to the global statistic for groups never seen with a value.
/// Numeric columns use the mean, categorical ones the mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupImputer {
    pub value_col: String,
    pub group_cols: Vec<String>,
    pub stats: GroupStats,
}

fn group_key(group_cols: &[&Column], row: usize) -> String {
    let mut key = String::new();
    for (k, c) in group_cols.iter().enumerate() {
        if k > 0 {
            key.push(KEY_SEP);
        }
        match c.text_at(row) {
            Some(s) => key.push_str(&s),
            None => key.push_str("NA"),
        }
    }
    key
}

fn resolve_groups<'a>(table: &'a Table, group_cols: &[String]) -> Result<Vec<&'a Column>> {
    group_cols.iter().map(|g| table.column(g)).collect()
}

/// Most frequent value; ties go to the lexicographically smallest.
fn mode(counts: &BTreeMap<String, usize>) -> Option<String> {
    let mut best: Option<(&String, usize)> = None;
    for (k, &c) in counts {
        if best.is_none_or(|(_, bc)| c > bc) {
            best = Some((k, c));
        }
    }
    best.map(|(k, _)| k.clone())
}

impl GroupImputer {
    pub fn fit(table: &Table, value_col: &str, group_cols: &[&str]) -> Result<Self> {
        let col = table.column(value_col)?;
        let group_names: Vec<String> = group_cols.iter().map(|s| s.to_string()).collect();
        let groups = resolve_groups(table, &group_names)?;
        let n = table.n_rows();
        let observed = n - col.missing_count();
        if observed == 0 {
            return Err(Error::invalid(format!(
                "column {value_col:?} has no observed values to impute from"
            )));
        }
        let stats = match col.kind() {
            ColumnKind::Numeric => {
                let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
                let mut total = 0.0;
                for i in 0..n {
                    if let Some(v) = col.numeric_at(i) {
                        let e = acc.entry(group_key(&groups, i)).or_insert((0.0, 0));
                        e.0 += v;
                        e.1 += 1;
                        total += v;
                    }
                }
                GroupStats::Mean {
                    groups: acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect(),
                    global: total / observed as f64,
                }
            }
            ColumnKind::Categorical => {
                let mut acc: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
                let mut global: BTreeMap<String, usize> = BTreeMap::new();
                for i in 0..n {
                    if let Some(v) = col.category_at(i) {
                        *acc.entry(group_key(&groups, i))
                            .or_default()
                            .entry(v.to_string())
                            .or_default() += 1;
                        *global.entry(v.to_string()).or_default() += 1;
                    }
                }
                GroupStats::Mode {
                    groups: acc
                        .into_iter()
                        .filter_map(|(k, counts)| mode(&counts).map(|m| (k, m)))
                        .collect(),
                    global: mode(&global).expect("observed > 0"),
                }
            }
            other => {
                return Err(Error::invalid(format!(
                    "cannot impute column {value_col:?} of kind {other:?}"
                )))
            }
        };
        Ok(Self {
            value_col: value_col.to_string(),
            group_cols: group_names,
            stats,
        })
    }

    /// Returns the table with missing cells of `value_col` filled. Observed
    /// cells are copied through untouched.
    pub fn apply(&self, table: &Table) -> Result<Table> {
        let col = table.column(&self.value_col)?;
        let groups = resolve_groups(table, &self.group_cols)?;
        let n = table.n_rows();
        let filled = match (&self.stats, col.kind()) {
            (GroupStats::Mean { groups: means, global }, ColumnKind::Numeric) => {
                let values = (0..n)
                    .map(|i| {
                        Some(col.numeric_at(i).unwrap_or_else(|| {
                            *means.get(&group_key(&groups, i)).unwrap_or(global)
                        }))
                    })
                    .collect();
                Column::numeric(&self.value_col, values)
            }
            (GroupStats::Mode { groups: modes, global }, ColumnKind::Categorical) => {
                let values: Vec<String> = (0..n)
                    .map(|i| match col.category_at(i) {
                        Some(v) => v.to_string(),
                        None => modes
                            .get(&group_key(&groups, i))
                            .unwrap_or(global)
                            .clone(),
                    })
                    .collect();
                let refs: Vec<Option<&str>> = values.iter().map(|s| Some(s.as_str())).collect();
                Column::categorical(&self.value_col, &refs)
            }
            _ => {
                return Err(Error::invalid(format!(
                    "column {:?} kind does not match the fitted imputer",
                    self.value_col
                )))
            }
        };
        let mut filled = filled;
        filled.schema = col.schema.clone();
        table.replace_column(filled)
    }
}

/// Fits a grouped mean imputer on `table` and applies it to the same table.
pub fn impute_group_mean(table: &Table, value_col: &str, group_cols: &[&str]) -> Result<Table> {
    let col = table.column(value_col)?;
    if col.kind() != ColumnKind::Numeric {
        return Err(Error::invalid(format!("column {value_col:?} is not numeric")));
    }
    GroupImputer::fit(table, value_col, group_cols)?.apply(table)
}
