//! Report assembly and rendering.
//!
//! A report is a header (timestamp, command, input digest, effective config)
//! followed by one or more named tables. CSV output puts each header item on
//! a `#` comment line and introduces each table with `# table=<name>`; JSON
//! output nests the same content in one object. Only the `generated_at` line
//! varies between identical runs.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Num(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) if v.is_finite() => format!("{v:.6}"),
            Cell::Num(_) | Cell::Empty => String::new(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Bool(b) => json!(b),
        }
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

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
    pub market: String,
    pub prices: usize,
    pub dropped_rows: usize,
    pub weekend_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub generated_at: String,
    pub command: &'static str,
    pub input: InputInfo,
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &'static str, input: InputInfo, config: &impl Serialize) -> Self {
        Self {
            generated_at: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            command,
            input,
            config: serde_json::to_value(config).expect("config serializes"),
            tables: Vec::new(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        writeln!(out, "# generated_at={}", self.generated_at).unwrap();
        writeln!(out, "# command={}", self.command).unwrap();
        writeln!(
            out,
            "# input={} sha256={} market={} prices={} dropped_rows={} weekend_excluded={}",
            i.path, i.sha256, i.market, i.prices, i.dropped_rows, i.weekend_excluded
        )
        .unwrap();
        writeln!(out, "# config={}", self.config).unwrap();
        for table in &self.tables {
            writeln!(out, "# table={}", table.name).unwrap();
            writeln!(out, "{}", table.columns.join(",")).unwrap();
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let mut tables = Map::new();
        for table in &self.tables {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            tables.insert(table.name.to_string(), Value::Array(rows));
        }
        let doc = json!({
            "generated_at": self.generated_at,
            "command": self.command,
            "input": self.input,
            "config": self.config,
            "tables": tables,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Report text with the timestamp line removed.
pub fn report_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("generated_at"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(
            "analyze",
            InputInfo {
                path: "x.csv".into(),
                sha256: "ab".into(),
                market: "X".into(),
                prices: 3,
                dropped_rows: 0,
                weekend_excluded: 0,
            },
            &json!({"seed": 1}),
        );
        let mut t = Table::new("params", &["day", "alpha0", "note"]);
        t.push(vec!["Monday".into(), 0.5.into(), "a,b".into()]);
        t.push(vec!["All".into(), Cell::Empty, Cell::Num(f64::NAN)]);
        r.tables.push(t);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# generated_at="));
        assert_eq!(lines[3], "# config={\"seed\":1}");
        assert_eq!(lines[4], "# table=params");
        assert_eq!(lines[5], "day,alpha0,note");
        assert_eq!(lines[6], "Monday,0.500000,\"a,b\"");
        assert_eq!(lines[7], "All,,");
    }

    #[test]
    fn json_layout_and_body() {
        let text = sample().render(Format::Json);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["tables"]["params"][0]["alpha0"], json!(0.5));
        assert_eq!(v["tables"]["params"][1]["alpha0"], Value::Null);
        let mut other = sample();
        other.generated_at = "1999-01-01T00:00:00Z".into();
        assert_eq!(report_body(&text), report_body(&other.render(Format::Json)));
    }
}
