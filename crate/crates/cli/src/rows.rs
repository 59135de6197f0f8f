//! Report rows and their on-disk forms.
//!
//! CSV carries exactly the metric columns; JSON carries the same values plus
//! the row status, error text and history path.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub const CSV_COLUMNS: [&str; 11] =
    ["function", "algorithm", "seed", "n", "m", "rho1", "rho2", "fes", "dis", "best_f", "wall_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Ok,
    /// The budget ran out; metrics describe the best-effort result.
    Exhausted,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub function: u8,
    pub algorithm: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub fes: Option<u64>,
    pub dis: Option<f64>,
    pub best_f: Option<f64>,
    pub wall_ms: Option<u64>,
    #[serde(default)]
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history: Option<String>,
}

/// Identity of a row within a campaign.
pub type RowKey = (u8, String, u64, usize, usize);

impl Row {
    pub fn new(function: u8, algorithm: &str, seed: u64, n: usize, m: usize) -> Self {
        Self {
            function,
            algorithm: algorithm.to_string(),
            seed,
            n,
            m,
            rho1: None,
            rho2: None,
            fes: None,
            dis: None,
            best_f: None,
            wall_ms: None,
            status: Status::Ok,
            error: None,
            history: None,
        }
    }

    pub fn failed(mut self, error: impl ToString) -> Self {
        self.status = Status::Failed;
        self.error = Some(error.to_string());
        self
    }

    pub fn key(&self) -> RowKey {
        (self.function, self.algorithm.clone(), self.seed, self.n, self.m)
    }

    pub fn succeeded(&self) -> bool {
        self.status != Status::Failed
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    function: u8,
    algorithm: String,
    seed: u64,
    n: usize,
    m: usize,
    rho1: Option<f64>,
    rho2: Option<f64>,
    fes: Option<u64>,
    dis: Option<f64>,
    best_f: Option<f64>,
    wall_ms: Option<u64>,
}

impl From<&Row> for CsvRow {
    fn from(r: &Row) -> Self {
        Self {
            function: r.function,
            algorithm: r.algorithm.clone(),
            seed: r.seed,
            n: r.n,
            m: r.m,
            rho1: r.rho1,
            rho2: r.rho2,
            fes: r.fes,
            dis: r.dis,
            best_f: r.best_f,
            wall_ms: r.wall_ms,
        }
    }
}

impl From<CsvRow> for Row {
    fn from(c: CsvRow) -> Self {
        // CSV drops the status; a row without an evaluation count failed.
        let status = if c.fes.is_some() { Status::Ok } else { Status::Failed };
        Self {
            function: c.function,
            algorithm: c.algorithm,
            seed: c.seed,
            n: c.n,
            m: c.m,
            rho1: c.rho1,
            rho2: c.rho2,
            fes: c.fes,
            dis: c.dis,
            best_f: c.best_f,
            wall_ms: c.wall_ms,
            status,
            error: None,
            history: None,
        }
    }
}

/// Sort into the canonical report order.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by_key(Row::key);
}

pub fn rows_to_string(rows: &[Row], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS).expect("writing to memory");
            for r in rows {
                w.serialize(CsvRow::from(r)).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).expect("rows are always serializable");
            s.push('\n');
            s
        }
    }
}

pub fn rows_from_str(text: &str, format: Format) -> Result<Vec<Row>, String> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let headers = r.headers().map_err(|e| e.to_string())?;
            if headers.iter().ne(CSV_COLUMNS) {
                return Err(format!("expected columns {}", CSV_COLUMNS.join(",")));
            }
            r.deserialize::<CsvRow>().map(|row| row.map(Row::from).map_err(|e| e.to_string())).collect()
        }
        Format::Json => serde_json::from_str(text).map_err(|e| e.to_string()),
    }
}

pub fn read_rows(path: &Path, format: Format) -> CliResult<Vec<Row>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    rows_from_str(&text, format).map_err(|e| CliError::report(path, e))
}

/// Format guessed from the file extension.
pub fn format_of(path: &Path) -> CliResult<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        _ => Err(CliError::Usage(format!("{}: expected a .csv or .json report", path.display()))),
    }
}
