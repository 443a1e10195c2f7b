use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::labels::LabelVector;
use super::schema::{schema_for_header, validate_schema, ColumnKind, ColumnSchema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Date {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

impl Date {
    /// Validated Gregorian date.
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(|_| Self { year, month, day })
    }

    pub fn parse(token: &str) -> Option<Self> {
        let d = NaiveDate::parse_from_str(token, "%Y-%m-%d").ok()?;
        Some(Self {
            year: d.year(),
            month: d.month(),
            day: d.day(),
        })
    }
}

impl std::fmt::Display for Date {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// Column storage. Values under a missing cell are placeholders and never read.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Interned categories: `codes[i]` indexes `vocab`.
    Categorical { codes: Vec<u32>, vocab: Vec<String> },
    Date(Vec<Date>),
    Label(Vec<u8>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
            ColumnData::Date(v) => v.len(),
            ColumnData::Label(v) => v.len(),
        }
    }

    fn take(&self, idx: &[usize]) -> Self {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(idx.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical { codes, vocab } => ColumnData::Categorical {
                codes: idx.iter().map(|&i| codes[i]).collect(),
                vocab: vocab.clone(),
            },
            ColumnData::Date(v) => ColumnData::Date(idx.iter().map(|&i| v[i]).collect()),
            ColumnData::Label(v) => ColumnData::Label(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub schema: ColumnSchema,
    pub data: ColumnData,
    pub missing: Vec<bool>,
}

impl Column {
    pub fn numeric(name: &str, values: Vec<Option<f64>>) -> Self {
        let missing = values.iter().map(Option::is_none).collect();
        Self {
            schema: ColumnSchema::new(name, ColumnKind::Numeric, true),
            data: ColumnData::Numeric(values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()),
            missing,
        }
    }

    pub fn categorical(name: &str, values: &[Option<&str>]) -> Self {
        let mut interner = Interner::default();
        let codes = values
            .iter()
            .map(|v| v.map_or(0, |s| interner.intern(s)))
            .collect();
        Self {
            schema: ColumnSchema::new(name, ColumnKind::Categorical, true),
            data: ColumnData::Categorical {
                codes,
                vocab: interner.vocab,
            },
            missing: values.iter().map(Option::is_none).collect(),
        }
    }

    pub fn date(name: &str, values: Vec<Option<Date>>) -> Self {
        let missing = values.iter().map(Option::is_none).collect();
        let placeholder = Date {
            year: 1970,
            month: 1,
            day: 1,
        };
        Self {
            schema: ColumnSchema::new(name, ColumnKind::Date, true),
            data: ColumnData::Date(values.into_iter().map(|d| d.unwrap_or(placeholder)).collect()),
            missing,
        }
    }

    pub fn label(name: &str, values: Vec<u8>) -> Self {
        Self {
            schema: ColumnSchema::new(name, ColumnKind::BinaryLabel, false),
            missing: vec![false; values.len()],
            data: ColumnData::Label(values),
        }
    }

    pub fn name(&self) -> &str {
        &self.schema.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.schema.kind
    }

    pub fn len(&self) -> usize {
        self.missing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.missing[row]
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    /// Numeric value at `row`, `None` when missing or non-numeric.
    pub fn numeric_at(&self, row: usize) -> Option<f64> {
        match &self.data {
            ColumnData::Numeric(v) if !self.missing[row] => Some(v[row]),
            _ => None,
        }
    }

    pub fn category_at(&self, row: usize) -> Option<&str> {
        match &self.data {
            ColumnData::Categorical { codes, vocab } if !self.missing[row] => {
                Some(vocab[codes[row] as usize].as_str())
            }
            _ => None,
        }
    }

    pub fn date_at(&self, row: usize) -> Option<Date> {
        match &self.data {
            ColumnData::Date(v) if !self.missing[row] => Some(v[row]),
            _ => None,
        }
    }

    /// Cell rendered as text, `None` when missing. Used for grouping keys and CSV output.
    pub fn text_at(&self, row: usize) -> Option<String> {
        if self.missing[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Categorical { codes, vocab } => vocab[codes[row] as usize].clone(),
            ColumnData::Date(v) => v[row].to_string(),
            ColumnData::Label(v) => if v[row] == 1 { "Yes" } else { "No" }.to_string(),
        })
    }

    fn take(&self, idx: &[usize]) -> Self {
        Self {
            schema: self.schema.clone(),
            data: self.data.take(idx),
            missing: idx.iter().map(|&i| self.missing[i]).collect(),
        }
    }
}

#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
    vocab: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.vocab.len() as u32;
        self.ids.insert(s.to_string(), id);
        self.vocab.push(s.to_string());
        id
    }
}

/// Column-typed in-memory dataset. Immutable once built; transforms return new tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    n_rows: usize,
    dropped_unlabeled: usize,
}

impl Table {
    pub fn from_columns(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Column::len);
        for c in &columns {
            if c.len() != n_rows || c.data.len() != n_rows {
                return Err(Error::Schema(format!(
                    "column {:?} has {} entries, expected {n_rows}",
                    c.name(),
                    c.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name()) {
                return Err(Error::Schema(format!("duplicate column name {:?}", c.name())));
            }
        }
        Ok(Self {
            columns,
            n_rows,
            dropped_unlabeled: 0,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Rows removed at load because the label cell was missing.
    pub fn dropped_unlabeled(&self) -> usize {
        self.dropped_unlabeled
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn schema(&self) -> Vec<ColumnSchema> {
        self.columns.iter().map(|c| c.schema.clone()).collect()
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(Column::name).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Schema(format!("unknown column {name:?}")))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.column_index(name).is_some()
    }

    /// The binary target as a label vector (1 = "Yes").
    pub fn labels(&self) -> Result<LabelVector> {
        let col = self
            .columns
            .iter()
            .find(|c| c.kind() == ColumnKind::BinaryLabel)
            .ok_or_else(|| Error::Schema("table has no binary_label column".into()))?;
        match &col.data {
            ColumnData::Label(v) => Ok(LabelVector::new(v.clone(), format!("{} = Yes", col.name()))),
            _ => Err(Error::Schema("label column storage is not binary".into())),
        }
    }

    pub fn take_rows(&self, idx: &[usize]) -> Self {
        Self {
            columns: self.columns.iter().map(|c| c.take(idx)).collect(),
            n_rows: idx.len(),
            dropped_unlabeled: self.dropped_unlabeled,
        }
    }

    /// Returns the table without the named columns.
    pub fn drop_columns(&self, names: &[&str]) -> Result<Self> {
        for n in names {
            if !self.has_column(n) {
                return Err(Error::Schema(format!("cannot drop unknown column {n:?}")));
            }
        }
        Ok(Self {
            columns: self
                .columns
                .iter()
                .filter(|c| !names.contains(&c.name()))
                .cloned()
                .collect(),
            n_rows: self.n_rows,
            dropped_unlabeled: self.dropped_unlabeled,
        })
    }

    /// Replaces the column at `pos` by `replacement` (any number of columns).
    pub fn splice_column(&self, pos: usize, replacement: Vec<Column>) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns.splice(pos..=pos, replacement);
        let mut t = Self::from_columns(columns)?;
        t.dropped_unlabeled = self.dropped_unlabeled;
        Ok(t)
    }

    pub fn replace_column(&self, column: Column) -> Result<Self> {
        let pos = self
            .column_index(column.name())
            .ok_or_else(|| Error::Schema(format!("unknown column {:?}", column.name())))?;
        self.splice_column(pos, vec![column])
    }

    /// Writes the table as CSV. Missing cells become `NA`; numbers use the
    /// shortest representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.columns.iter().map(Column::name))?;
        for i in 0..self.n_rows {
            w.write_record(
                self.columns
                    .iter()
                    .map(|c| c.text_at(i).unwrap_or_else(|| "NA".to_string())),
            )?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

fn is_missing_token(tok: &str) -> bool {
    tok.is_empty() || tok == "NA"
}

/// Reads a CSV whose header must equal the schema names, in order.
///
/// Empty cells and the literal `NA` are missing. Rows with a missing label
/// are dropped and counted in [`Table::dropped_unlabeled`].
pub fn load_csv(path: &Path, schema: &[ColumnSchema]) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Loads the weather file, picking the schema variant from its header.
pub fn load_weather_csv(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let schema = schema_for_header(&header)?;
    load_csv(path, &schema)
}

pub fn read_csv<R: Read>(reader: R, schema: &[ColumnSchema]) -> Result<Table> {
    validate_schema(schema)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    check_header(&header, schema)?;

    let mut builders: Vec<Builder> = schema.iter().map(Builder::new).collect();
    let mut dropped = 0usize;
    let label_pos = schema
        .iter()
        .position(|c| c.kind == ColumnKind::BinaryLabel)
        .expect("validated schema has a label");

    for (rec_no, rec) in rdr.records().enumerate() {
        let rec = rec?;
        // line 1 is the header
        let line = rec.position().map_or(rec_no + 2, |p| p.line() as usize);
        if rec.len() != schema.len() {
            return Err(Error::Csv(format!(
                "line {line}: expected {} fields, found {}",
                schema.len(),
                rec.len()
            )));
        }
        if is_missing_token(rec[label_pos].trim()) {
            dropped += 1;
            continue;
        }
        for (j, b) in builders.iter_mut().enumerate() {
            b.push(rec[j].trim(), line)?;
        }
    }
    let columns = builders.into_iter().map(Builder::finish).collect();
    let mut table = Table::from_columns(columns)?;
    table.dropped_unlabeled = dropped;
    if dropped > 0 {
        log::info!("dropped {dropped} rows with a missing label");
    }
    Ok(table)
}

fn check_header(header: &[String], schema: &[ColumnSchema]) -> Result<()> {
    let mut offending = Vec::new();
    for i in 0..header.len().max(schema.len()) {
        match (header.get(i), schema.get(i)) {
            (Some(h), Some(s)) if h.trim() == s.name => {}
            (Some(h), Some(s)) => offending.push(format!("#{}: expected {}, found {}", i + 1, s.name, h)),
            (None, Some(s)) => offending.push(format!("#{}: missing {}", i + 1, s.name)),
            (Some(h), None) => offending.push(format!("#{}: unexpected {}", i + 1, h)),
            (None, None) => unreachable!(),
        }
    }
    if offending.is_empty() {
        Ok(())
    } else {
        Err(Error::HeaderMismatch { offending })
    }
}

struct Builder {
    schema: ColumnSchema,
    missing: Vec<bool>,
    numeric: Vec<f64>,
    codes: Vec<u32>,
    interner: Interner,
    dates: Vec<Date>,
    labels: Vec<u8>,
}

impl Builder {
    fn new(schema: &ColumnSchema) -> Self {
        Self {
            schema: schema.clone(),
            missing: Vec::new(),
            numeric: Vec::new(),
            codes: Vec::new(),
            interner: Interner::default(),
            dates: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn err(&self, line: usize, tok: &str) -> Error {
        Error::ParseCell {
            row: line,
            column: self.schema.name.clone(),
            token: tok.to_string(),
        }
    }

    fn push(&mut self, tok: &str, line: usize) -> Result<()> {
        let missing = is_missing_token(tok);
        if missing && !self.schema.nullable && self.schema.kind != ColumnKind::BinaryLabel {
            return Err(self.err(line, tok));
        }
        self.missing.push(missing);
        match self.schema.kind {
            ColumnKind::Numeric => {
                let v = if missing {
                    f64::NAN
                } else {
                    match tok.parse::<f64>() {
                        Ok(v) if v.is_finite() => v,
                        _ => return Err(self.err(line, tok)),
                    }
                };
                self.numeric.push(v);
            }
            ColumnKind::Categorical => {
                let code = if missing { 0 } else { self.interner.intern(tok) };
                self.codes.push(code);
            }
            ColumnKind::Date => {
                let d = if missing {
                    Date { year: 1970, month: 1, day: 1 }
                } else {
                    Date::parse(tok).ok_or_else(|| self.err(line, tok))?
                };
                self.dates.push(d);
            }
            ColumnKind::BinaryLabel => {
                let v = match tok {
                    "Yes" | "yes" | "1" => 1,
                    "No" | "no" | "0" => 0,
                    _ => return Err(self.err(line, tok)),
                };
                self.labels.push(v);
            }
        }
        Ok(())
    }

    fn finish(self) -> Column {
        let data = match self.schema.kind {
            ColumnKind::Numeric => ColumnData::Numeric(self.numeric),
            ColumnKind::Categorical => ColumnData::Categorical {
                codes: self.codes,
                vocab: self.interner.vocab,
            },
            ColumnKind::Date => ColumnData::Date(self.dates),
            ColumnKind::BinaryLabel => ColumnData::Label(self.labels),
        };
        Column {
            schema: self.schema,
            data,
            missing: self.missing,
        }
    }
}
