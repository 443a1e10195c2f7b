//! Synthetic stand-in for the daily weather file.
//!
//! Produces a table with the full 24-column weather schema, realistic
//! missingness on Sunshine/Evaporation/Cloud9am/Cloud3pm, an imbalanced
//! RainTomorrow (roughly one positive in four or five) driven mostly by
//! afternoon humidity, today's rain, sunshine and pressure, and a `RISK_MM`
//! column from which the target is derived. Used for tests, demos and
//! desk-scale runs when the real file is not at hand.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::schema::{weather_schema, LEAKY_COLUMN, TARGET_COLUMN};
use super::table::{Column, Date, Table};
use crate::error::Result;
use crate::rng;

const LOCATIONS: [&str; 12] = [
    "Albury", "Sydney", "Melbourne", "Brisbane", "Perth", "Adelaide", "Hobart", "Darwin",
    "Cairns", "Canberra", "Townsville", "AliceSprings",
];

pub const WIND_DIRECTIONS: [&str; 16] = [
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW",
    "NNW",
];

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub n_rows: usize,
    pub seed: u64,
    /// Fraction of rows whose RainTomorrow cell is blanked (dropped at load).
    pub unlabeled_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_rows: 10_000,
            seed: 42,
            unlabeled_fraction: 0.02,
        }
    }
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

fn maybe(rng: &mut impl Rng, p_missing: f64, v: f64) -> Option<f64> {
    if rng.gen::<f64>() < p_missing {
        None
    } else {
        Some(v)
    }
}

/// Synthetic rows as CSV cells in weather-schema order; `None` is a missing cell.
pub fn synthetic_rows(cfg: &SynthConfig) -> Vec<Vec<Option<String>>> {
    let mut r = rng::seeded(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("valid normal");
    let n = |r: &mut rand_chacha::ChaCha8Rng| std_normal.sample(r);

    let mut rows = Vec::with_capacity(cfg.n_rows);
    let start = chrono::NaiveDate::from_ymd_opt(2008, 12, 1).expect("valid date");
    let n_loc = LOCATIONS.len();
    for i in 0..cfg.n_rows {
        let loc = i % n_loc;
        let day = chrono::Duration::days((i / n_loc) as i64);
        let date = start + day;
        let month = chrono::Datelike::month(&date) as f64;
        let season = (2.0 * std::f64::consts::PI * (month - 1.0) / 12.0).cos();
        let loc_wet = (loc as f64 / n_loc as f64 - 0.5) * 1.5;

        let humid9 = (68.0 + 8.0 * loc_wet + 14.0 * n(&mut r)).clamp(0.0, 100.0).round();
        let humid3 = (0.55 * humid9 + 20.0 + 12.0 * n(&mut r)).clamp(0.0, 100.0).round();
        let cloud9 = ((humid9 - 40.0) / 7.0 + 1.8 * n(&mut r)).clamp(0.0, 8.0).round();
        let cloud3 = ((humid3 - 25.0) / 7.0 + 1.8 * n(&mut r)).clamp(0.0, 8.0).round();
        let sunshine = round1((12.5 - 1.1 * cloud3 + 1.5 * n(&mut r) + 1.5 * season).clamp(0.0, 14.0));
        let rained = r.gen::<f64>() < 0.08 + 0.004 * (humid9 - 40.0).max(0.0);
        let rainfall = if rained {
            round1((0.8 + 1.2 * n(&mut r)).exp())
        } else if r.gen::<f64>() < 0.3 {
            round1(r.gen::<f64>() * 0.8)
        } else {
            0.0
        };
        let rain_today = rainfall > 1.0;
        let p3 = round1(1016.0 - 0.06 * (humid3 - 50.0) + 6.0 * n(&mut r) - 3.0 * season);
        let p9 = round1(p3 + 2.2 + 1.4 * n(&mut r));
        let min_t = round1(12.0 + 6.0 * season - 3.0 * loc_wet + 4.0 * n(&mut r));
        let max_t = round1(min_t + 10.0 + 0.3 * sunshine + 3.0 * n(&mut r));
        let temp9 = round1(min_t + 4.5 + 1.5 * n(&mut r));
        let temp3 = round1(max_t - 1.5 + 1.0 * n(&mut r));
        let gust = (40.0 + 13.0 * n(&mut r)).clamp(6.0, 130.0).round();
        let ws9 = (14.0 + 8.0 * n(&mut r)).clamp(0.0, 90.0).round();
        let ws3 = (18.0 + 8.0 * n(&mut r)).clamp(0.0, 90.0).round();
        let evap = round1((5.0 + 0.4 * sunshine - 2.0 + 2.5 * n(&mut r)).max(0.0));
        let dirs: Vec<&str> = (0..3)
            .map(|_| WIND_DIRECTIONS[r.gen_range(0..WIND_DIRECTIONS.len())])
            .collect();

        let logit = -1.95 + 0.075 * (humid3 - 52.0) + 0.75 * f64::from(u8::from(rain_today))
            - 0.10 * (sunshine - 7.5)
            + 0.035 * (gust - 40.0)
            - 0.05 * (p3 - 1016.0)
            + 0.9 * n(&mut r);
        let p_rain = 1.0 / (1.0 + (-logit).exp());
        let rain_tomorrow = r.gen::<f64>() < p_rain;
        let risk_mm = if rain_tomorrow {
            round1(1.1 + (0.9 + 1.1 * n(&mut r)).exp())
        } else if r.gen::<f64>() < 0.4 {
            round1(r.gen::<f64>())
        } else {
            0.0
        };

        let num = |v: Option<f64>| v.map(|x| format!("{x}"));
        let cat = |v: Option<&str>| v.map(str::to_string);
        let mut row: Vec<Option<String>> = Vec::with_capacity(24);
        row.push(Some(date.format("%Y-%m-%d").to_string()));
        row.push(Some(LOCATIONS[loc].to_string()));
        row.push(num(maybe(&mut r, 0.01, min_t)));
        row.push(num(maybe(&mut r, 0.01, max_t)));
        let rainfall_missing = r.gen::<f64>() < 0.01;
        row.push(num((!rainfall_missing).then_some(rainfall)));
        row.push(num(maybe(&mut r, 0.48, evap)));
        row.push(num(maybe(&mut r, 0.43, sunshine)));
        row.push(cat((r.gen::<f64>() >= 0.06).then_some(dirs[0])));
        row.push(num(maybe(&mut r, 0.06, gust)));
        row.push(cat((r.gen::<f64>() >= 0.07).then_some(dirs[1])));
        row.push(cat((r.gen::<f64>() >= 0.03).then_some(dirs[2])));
        row.push(num(maybe(&mut r, 0.01, ws9)));
        row.push(num(maybe(&mut r, 0.02, ws3)));
        row.push(num(maybe(&mut r, 0.01, humid9)));
        row.push(num(maybe(&mut r, 0.02, humid3)));
        row.push(num(maybe(&mut r, 0.10, p9)));
        row.push(num(maybe(&mut r, 0.10, p3)));
        row.push(num(maybe(&mut r, 0.38, cloud9)));
        row.push(num(maybe(&mut r, 0.40, cloud3)));
        row.push(num(maybe(&mut r, 0.01, temp9)));
        row.push(num(maybe(&mut r, 0.02, temp3)));
        row.push((!rainfall_missing).then(|| if rain_today { "Yes" } else { "No" }.to_string()));
        let unlabeled = r.gen::<f64>() < cfg.unlabeled_fraction;
        row.push(num((!unlabeled).then_some(risk_mm)));
        row.push((!unlabeled).then(|| if rain_tomorrow { "Yes" } else { "No" }.to_string()));
        rows.push(row);
    }
    rows
}

/// Writes a synthetic weather CSV (24 columns, `NA` for missing cells).
pub fn write_synthetic_csv<W: std::io::Write>(cfg: &SynthConfig, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(weather_schema(true).iter().map(|c| c.name.as_str()))?;
    for row in synthetic_rows(cfg) {
        w.write_record(row.iter().map(|c| c.as_deref().unwrap_or("NA")))?;
    }
    w.flush().map_err(|e| crate::error::Error::Csv(e.to_string()))?;
    Ok(())
}

/// Synthetic table as it would come back from loading the CSV.
pub fn synthetic_table(cfg: &SynthConfig) -> Result<Table> {
    let mut buf = Vec::new();
    write_synthetic_csv(cfg, &mut buf)?;
    super::table::read_csv(buf.as_slice(), &weather_schema(true))
}

/// A tiny hand-built table used in unit tests across modules.
pub fn tiny_table() -> Table {
    let d = |m, day| Date::new(2017, m, day);
    Table::from_columns(vec![
        Column::date("Date", vec![d(1, 1), d(1, 2), d(2, 1), d(1, 3), d(2, 2), None]),
        Column::categorical(
            "Location",
            &[Some("A"), Some("A"), Some("A"), Some("B"), Some("B"), Some("B")],
        ),
        Column::numeric(
            "Sunshine",
            vec![Some(10.0), None, Some(3.0), Some(14.0), None, None],
        ),
        Column::categorical(
            "WindDir3pm",
            &[Some("N"), Some("S"), None, Some("N"), Some("E"), Some("N")],
        ),
        Column::numeric(LEAKY_COLUMN, vec![Some(0.0), Some(3.0), Some(0.0), Some(5.0), Some(0.2), Some(9.0)]),
        Column::label(TARGET_COLUMN, vec![0, 1, 0, 1, 0, 1]),
    ])
    .expect("consistent tiny table")
}
