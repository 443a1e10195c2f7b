use crate::dataset::{Column, ColumnKind, Table};
use crate::error::{Error, Result};

/// Replaces the date column with numeric `Year`, `Month`, `Day` columns at
/// the same position. A missing date makes all three cells missing.
pub fn expand_date(table: &Table) -> Result<Table> {
    let pos = table
        .columns()
        .iter()
        .position(|c| c.kind() == ColumnKind::Date)
        .ok_or_else(|| Error::Schema("table has no date column".into()))?;
    let col = &table.columns()[pos];
    let n = table.n_rows();
    let mut year = Vec::with_capacity(n);
    let mut month = Vec::with_capacity(n);
    let mut day = Vec::with_capacity(n);
    for i in 0..n {
        let d = col.date_at(i);
        year.push(d.map(|d| f64::from(d.year)));
        month.push(d.map(|d| f64::from(d.month)));
        day.push(d.map(|d| f64::from(d.day)));
    }
    table.splice_column(
        pos,
        vec![
            Column::numeric("Year", year),
            Column::numeric("Month", month),
            Column::numeric("Day", day),
        ],
    )
}
