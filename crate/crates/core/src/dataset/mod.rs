//! Raw weather table: schema, CSV loading, labels and holdout splitting.

mod labels;
mod schema;
mod split;
pub mod synth;
mod table;

pub use labels::{class_counts, ClassCounts, LabelVector};
pub use schema::{
    schema_for_header, weather_schema, ColumnKind, ColumnSchema, LEAKY_COLUMN, TARGET_COLUMN,
};
pub use split::{split_holdout, SplitPair};
pub use table::{load_csv, load_weather_csv, read_csv, Column, ColumnData, Date, Table};
