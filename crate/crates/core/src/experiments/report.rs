//! Tabular reports with CSV and JSON emission.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{KerginError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = KerginError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(KerginError::Config(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

/// One table entry.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt_float(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(x.to_string()),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x:e}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| KerginError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| KerginError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| KerginError::Io(e.to_string()))
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.to_json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// A named pass/fail verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub table: Table,
    pub checks: Vec<Check>,
    /// Certificates and other structured results.
    pub extras: Map<String, Value>,
}

impl Report {
    pub fn new(experiment: &str, config_hash: String, seed: u64, table: Table) -> Self {
        Report {
            metadata: Metadata {
                experiment: experiment.to_string(),
                config_hash,
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                notes: Vec::new(),
            },
            table,
            checks: Vec::new(),
            extras: Map::new(),
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.metadata.notes.push(text.into());
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extra(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("extras serialize");
        self.extras.insert(key.to_string(), value);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn checks_csv(&self) -> Result<String> {
        let mut t = Table::new(&["check", "passed", "detail"]);
        for c in &self.checks {
            t.push(vec![c.name.as_str().into(), c.passed.into(), c.detail.as_str().into()]);
        }
        t.to_csv()
    }

    /// Writes `<stem>.csv` and `<stem>_checks.csv`, or `<stem>.json`.
    /// Returns the paths written.
    pub fn write(&self, dir: &Path, stem: &str, format: OutputFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            OutputFormat::Csv => {
                let main = dir.join(format!("{stem}.csv"));
                fs::write(&main, self.table.to_csv()?)?;
                let checks = dir.join(format!("{stem}_checks.csv"));
                fs::write(&checks, self.checks_csv()?)?;
                written.extend([main, checks]);
            }
            OutputFormat::Json => {
                let main = dir.join(format!("{stem}.json"));
                fs::write(&main, self.to_json())?;
                written.push(main);
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["k", "value", "ok", "note"]);
        t.push(vec![1usize.into(), 0.25.into(), true.into(), "a,b".into()]);
        t.push(vec![2usize.into(), Cell::Empty, false.into(), Cell::Empty]);
        let mut r = Report::new("demo", "abc".into(), 3, t);
        r.check(Check::new("first", true, ""));
        r.check(Check::new("second", false, "bad"));
        r
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let csv = sample().table.to_csv().unwrap();
        assert_eq!(csv, "k,value,ok,note\n1,2.5e-1,true,\"a,b\"\n2,,false,\n");
    }

    #[test]
    fn json_mirrors_rows() {
        let r = sample();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["table"][0]["value"], json!(0.25));
        assert_eq!(v["table"][1]["value"], Value::Null);
        assert_eq!(v["metadata"]["config_hash"], "abc");
        assert!(!r.passed());
        assert_eq!(r.first_failure().unwrap().name, "second");
    }

    #[test]
    fn float_cells_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300] {
            let text = Cell::Float(x).to_string();
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
    }
}
