use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dataset::{class_counts, load_weather_csv, ClassCounts, ColumnKind, Table};
use crate::error::{Error, Result};
use crate::preprocess::correlation::pearson;

/// Per-column summary; statistics are `None` where undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnStats {
    pub name: String,
    pub kind: ColumnKind,
    pub count: usize,
    pub missing: usize,
    pub missing_pct: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreSummary {
    pub n_rows: usize,
    pub dropped_unlabeled: usize,
    pub columns: Vec<ColumnStats>,
    pub classes: Option<ClassCounts>,
    /// Numeric columns plus the target coded 0/1.
    pub corr_names: Vec<String>,
    /// Pairwise-complete Pearson correlation; `None` when undefined.
    pub correlation: Vec<Vec<Option<f64>>>,
}

fn numeric_values(table: &Table, idx: usize) -> Option<Vec<Option<f64>>> {
    let c = &table.columns()[idx];
    match c.kind() {
        ColumnKind::Numeric => Some((0..table.n_rows()).map(|i| c.numeric_at(i)).collect()),
        ColumnKind::BinaryLabel => Some(
            (0..table.n_rows())
                .map(|i| c.text_at(i).map(|t| if t == "Yes" { 1.0 } else { 0.0 }))
                .collect(),
        ),
        _ => None,
    }
}

fn stats(name: &str, kind: ColumnKind, values: Option<&[Option<f64>]>, n: usize, missing: usize) -> ColumnStats {
    let observed: Vec<f64> = values.map(|v| v.iter().flatten().copied().collect()).unwrap_or_default();
    let k = observed.len() as f64;
    let mean = (!observed.is_empty()).then(|| observed.iter().sum::<f64>() / k);
    let std = mean.filter(|_| observed.len() > 1).map(|m| {
        (observed.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    });
    let min = observed.iter().copied().reduce(f64::min);
    let max = observed.iter().copied().reduce(f64::max);
    ColumnStats {
        name: name.to_string(),
        kind,
        count: n - missing,
        missing,
        missing_pct: (n > 0).then(|| 100.0 * missing as f64 / n as f64),
        mean,
        std,
        min,
        max,
    }
}

pub fn explore_table(table: &Table) -> ExploreSummary {
    let n = table.n_rows();
    let mut columns = Vec::new();
    let mut corr_names = Vec::new();
    let mut corr_values: Vec<Vec<Option<f64>>> = Vec::new();
    for (idx, c) in table.columns().iter().enumerate() {
        let values = numeric_values(table, idx);
        columns.push(stats(c.name(), c.kind(), values.as_deref(), n, c.missing_count()));
        if let Some(v) = values {
            corr_names.push(c.name().to_string());
            corr_values.push(v);
        }
    }
    let m = corr_values.len();
    let mut correlation = vec![vec![None; m]; m];
    for a in 0..m {
        for b in a..m {
            let (xs, ys): (Vec<f64>, Vec<f64>) = corr_values[a]
                .iter()
                .zip(&corr_values[b])
                .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
                .unzip();
            let r = if xs.len() >= 2 { pearson(&xs, &ys) } else { None };
            correlation[a][b] = r;
            correlation[b][a] = r;
        }
    }
    let classes = table.labels().ok().map(|l| class_counts(&l));
    ExploreSummary {
        n_rows: n,
        dropped_unlabeled: table.dropped_unlabeled(),
        columns,
        classes,
        corr_names,
        correlation,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| Error::Csv(e.to_string()))
}

impl ExploreSummary {
    pub fn summary_csv(&self) -> Result<Vec<u8>> {
        let header: Vec<String> = ["column", "kind", "count", "missing", "missing_pct", "mean", "std", "min", "max"]
            .map(String::from)
            .to_vec();
        let rows: Vec<Vec<String>> = self
            .columns
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    serde_json::to_value(c.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    c.count.to_string(),
                    c.missing.to_string(),
                    cell(c.missing_pct),
                    cell(c.mean),
                    cell(c.std),
                    cell(c.min),
                    cell(c.max),
                ]
            })
            .collect();
        csv_bytes(&header, &rows)
    }

    pub fn correlation_csv(&self) -> Result<Vec<u8>> {
        let mut header = vec![String::new()];
        header.extend(self.corr_names.iter().cloned());
        let rows: Vec<Vec<String>> = self
            .corr_names
            .iter()
            .zip(&self.correlation)
            .map(|(n, row)| std::iter::once(n.clone()).chain(row.iter().map(|v| cell(*v))).collect())
            .collect();
        csv_bytes(&header, &rows)
    }

    pub fn classes_csv(&self) -> Result<Vec<u8>> {
        let header = vec!["class".to_string(), "label".to_string(), "count".to_string()];
        let rows = match self.classes {
            Some(c) => vec![
                vec!["0".into(), "No".into(), c.n_negative.to_string()],
                vec!["1".into(), "Yes".into(), c.n_positive.to_string()],
            ],
            None => Vec::new(),
        };
        csv_bytes(&header, &rows)
    }

    pub fn markdown(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
        let mut s = format!("# Data summary\n\n{} rows ({} dropped for a missing target)\n\n", self.n_rows, self.dropped_unlabeled);
        if let Some(c) = self.classes {
            let _ = writeln!(s, "Class distribution: {} No, {} Yes\n", c.n_negative, c.n_positive);
        }
        s.push_str("| column | count | missing % | mean | std | min | max |\n|---|---|---|---|---|---|---|\n");
        for c in &self.columns {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                c.name,
                c.count,
                f(c.missing_pct),
                f(c.mean),
                f(c.std),
                f(c.min),
                f(c.max)
            );
        }
        s
    }

    /// Writes summary.csv, class_distribution.csv, correlation.csv and summary.md.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files: [(&str, Vec<u8>); 4] = [
            ("summary.csv", self.summary_csv()?),
            ("class_distribution.csv", self.classes_csv()?),
            ("correlation.csv", self.correlation_csv()?),
            ("summary.md", self.markdown().into_bytes()),
        ];
        for (name, bytes) in files {
            let p = dir.join(name);
            fs::write(&p, bytes).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

pub fn explore(data_path: &Path) -> Result<ExploreSummary> {
    Ok(explore_table(&load_weather_csv(data_path)?))
}
