//! Tabular experiment reports with CSV and JSON emitters.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(k) => Some(*k as f64),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Int(k) => k.to_string(),
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<u64> for Cell {
    fn from(k: u64) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<u32> for Cell {
    fn from(k: u32) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Vec<f64>> for Cell {
    fn from(v: Vec<f64>) -> Self {
        Cell::Text(v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub threshold: f64,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub version: String,
    pub schema_version: u32,
    pub params: BTreeMap<String, Cell>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
    /// Rows whose computation failed numerically and were left blank.
    pub numerical_failures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl ExperimentReport {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            params: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            numerical_failures: 0,
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<Cell>) -> &mut Self {
        self.params.insert(name.to_string(), value.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn verdict(&mut self, name: &str, passed: bool, threshold: f64, observed: f64) {
        self.verdicts.push(Verdict { name: name.to_string(), passed, threshold, observed });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| std::io::Error::other(e);
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(std::io::Error::other)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("reports are UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo", &["name", "x", "k"]);
        r.param("seed", 3u64);
        r.push_row(vec!["a,b".into(), 0.1.into(), 2usize.into()]);
        r.push_row(vec!["c".into(), Cell::Missing, 5usize.into()]);
        r.verdict("ok", true, 1.0, 0.5);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv);
        assert_eq!(text, "name,x,k\n\"a,b\",1.0000000000000001e-1,2\nc,,5\n");
    }

    #[test]
    fn csv_and_json_agree() {
        let r = sample();
        let json: ExperimentReport = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(json.rows[0][1].as_f64(), Some(0.1));
        let csv_x: f64 = r.render(Format::Csv).lines().nth(1).unwrap().rsplit(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(csv_x, 0.1);
        assert_eq!(json.verdicts, r.verdicts);
    }
}
