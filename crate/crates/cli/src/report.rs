//! Per-cell aggregation of campaign rows.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};
use crate::rows::Row;

/// `x` in scientific notation with two decimals and a signed two-digit
/// exponent, e.g. `1.63e-14`.
pub fn sci2(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub runs: usize,
    pub median: f64,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

pub fn stats(values: &[f64]) -> Option<Stats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    let median = if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) };
    let mean = v.iter().sum::<f64>() / k as f64;
    let std = if k > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(Stats { runs: k, median, mean, std })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub function: u8,
    pub algorithm: String,
    pub metric: &'static str,
    pub runs: usize,
    pub median: String,
    pub mean: String,
    pub std: String,
}

type Metric = (&'static str, fn(&Row) -> Option<f64>);

const METRICS: [Metric; 6] = [
    ("rho1", |r| r.rho1),
    ("rho2", |r| r.rho2),
    ("fes", |r| r.fes.map(|v| v as f64)),
    ("dis", |r| r.dis),
    ("best_f", |r| r.best_f),
    ("wall_ms", |r| r.wall_ms.map(|v| v as f64)),
];

/// One aggregate per (function, algorithm, metric) over the rows that
/// succeeded. Metrics absent from every row of a cell are left out.
pub fn aggregate(rows: &[Row]) -> CliResult<Vec<Aggregate>> {
    if rows.is_empty() {
        return Err(CliError::Usage("no rows to report".into()));
    }
    let mut cells: BTreeMap<(u8, &str), Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.succeeded()) {
        cells.entry((r.function, r.algorithm.as_str())).or_default().push(r);
    }
    let mut out = Vec::new();
    for ((function, algorithm), cell) in cells {
        for (metric, get) in METRICS {
            let values: Vec<f64> = cell.iter().filter_map(|r| get(r)).collect();
            if let Some(s) = stats(&values) {
                out.push(Aggregate {
                    function,
                    algorithm: algorithm.to_string(),
                    metric,
                    runs: s.runs,
                    median: sci2(s.median),
                    mean: sci2(s.mean),
                    std: sci2(s.std),
                });
            }
        }
    }
    Ok(out)
}

pub fn aggregates_to_string(aggs: &[Aggregate], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if aggs.is_empty() {
                w.write_record(["function", "algorithm", "metric", "runs", "median", "mean", "std"])
                    .expect("writing to memory");
            }
            for a in aggs {
                w.serialize(a).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(aggs).expect("aggregates are always serializable");
            s.push('\n');
            s
        }
    }
}

/// Write `summary.<ext>` into `out_dir`.
pub fn write_report(rows: &[Row], out_dir: &Path, format: Format) -> CliResult<PathBuf> {
    let aggs = aggregate(rows)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let path = out_dir.join(format!("summary.{}", format.extension()));
    std::fs::write(&path, aggregates_to_string(&aggs, format)).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
