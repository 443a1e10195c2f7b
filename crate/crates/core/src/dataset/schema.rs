use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TARGET_COLUMN: &str = "RainTomorrow";
/// Next-day rainfall in mm; the target is derived from it.
pub const LEAKY_COLUMN: &str = "RISK_MM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Date,
    BinaryLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub nullable: bool,
}

impl ColumnSchema {
    pub fn new(name: impl Into<String>, kind: ColumnKind, nullable: bool) -> Self {
        Self {
            name: name.into(),
            kind,
            nullable,
        }
    }
}

/// Checks that names are unique and exactly one column is the binary label.
pub fn validate_schema(schema: &[ColumnSchema]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for c in schema {
        if !seen.insert(c.name.as_str()) {
            return Err(Error::Schema(format!("duplicate column name {:?}", c.name)));
        }
    }
    let n_labels = schema
        .iter()
        .filter(|c| c.kind == ColumnKind::BinaryLabel)
        .count();
    if n_labels != 1 {
        return Err(Error::Schema(format!(
            "schema must have exactly one binary_label column, found {n_labels}"
        )));
    }
    Ok(())
}

/// The daily-observation weather schema in file order. The newer public
/// releases of the file omit `RISK_MM`, hence the switch.
pub fn weather_schema(include_risk_mm: bool) -> Vec<ColumnSchema> {
    use ColumnKind::*;
    let mut cols = vec![
        ColumnSchema::new("Date", Date, false),
        ColumnSchema::new("Location", Categorical, false),
    ];
    for name in ["MinTemp", "MaxTemp", "Rainfall", "Evaporation", "Sunshine"] {
        cols.push(ColumnSchema::new(name, Numeric, true));
    }
    cols.push(ColumnSchema::new("WindGustDir", Categorical, true));
    cols.push(ColumnSchema::new("WindGustSpeed", Numeric, true));
    cols.push(ColumnSchema::new("WindDir9am", Categorical, true));
    cols.push(ColumnSchema::new("WindDir3pm", Categorical, true));
    for name in [
        "WindSpeed9am",
        "WindSpeed3pm",
        "Humidity9am",
        "Humidity3pm",
        "Pressure9am",
        "Pressure3pm",
        "Cloud9am",
        "Cloud3pm",
        "Temp9am",
        "Temp3pm",
    ] {
        cols.push(ColumnSchema::new(name, Numeric, true));
    }
    cols.push(ColumnSchema::new("RainToday", Categorical, true));
    if include_risk_mm {
        cols.push(ColumnSchema::new(LEAKY_COLUMN, Numeric, true));
    }
    cols.push(ColumnSchema::new(TARGET_COLUMN, BinaryLabel, true));
    cols
}

/// Picks the weather schema variant whose names match `header`.
pub fn schema_for_header(header: &[String]) -> Result<Vec<ColumnSchema>> {
    let with_risk = weather_schema(true);
    if header.len() == with_risk.len() {
        return Ok(with_risk);
    }
    Ok(weather_schema(false))
}
