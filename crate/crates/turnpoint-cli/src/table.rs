//! Versioned tabular output, rendered as CSV or JSON with identical content.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use turnpoint::Cplx;

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) if v.is_finite() => format!("{v:e}"),
            Self::Float(v) => v.to_string(),
            Self::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
            Self::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Int(v) => json!(v),
            Self::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Self::Text(s) => json!(s),
            Self::Bool(b) => json!(b),
            Self::Null => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(i64::try_from(v).unwrap_or(i64::MAX))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Null, Into::into)
    }
}

/// Real and imaginary parts as two cells.
pub fn complex_cells(z: Option<Cplx>) -> [Cell; 2] {
    match z {
        Some(z) => [Cell::Float(z.re), Cell::Float(z.im)],
        None => [Cell::Null, Cell::Null],
    }
}

#[derive(Clone, Debug, PartialEq)]
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
        debug_assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }
}

/// Output of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# turnpoint schema={SCHEMA_VERSION} command={}\n", self.command);
        for table in &self.tables {
            let _ = writeln!(out, "# table={}", table.name);
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|table| {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|row| {
                        let record: Map<String, Value> =
                            table.columns.iter().zip(row).map(|(k, v)| ((*k).to_string(), v.json())).collect();
                        Value::Object(record)
                    })
                    .collect();
                json!({ "name": table.name, "columns": table.columns, "rows": rows })
            })
            .collect();
        json!({ "schema": SCHEMA_VERSION, "command": self.command, "tables": tables })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new("rows", &["n", "value", "note"]);
        t.push(vec![Cell::from(0usize), Cell::from(1e-20), Cell::from("a,b")]);
        t.push(vec![Cell::from(1usize), Cell::Float(f64::NAN), Cell::Null]);
        Report { command: "scorer", tables: vec![t] }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# turnpoint schema=1 command=scorer");
        assert_eq!(lines[1], "# table=rows");
        assert_eq!(lines[2], "n,value,note");
        assert_eq!(lines[3], "0,1e-20,\"a,b\"");
        assert_eq!(lines[4], "1,NaN,");
    }

    #[test]
    fn json_mirrors_csv() {
        let v = sample().to_json();
        assert_eq!(v["schema"], 1);
        let rows = &v["tables"][0]["rows"];
        assert_eq!(rows[0]["value"].as_f64(), Some(1e-20));
        assert_eq!(rows[0]["note"], "a,b");
        assert!(rows[1]["value"].is_null());
        assert_eq!(v["tables"][0]["columns"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn float_cells_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(Cell::Float(x).csv().parse::<f64>().unwrap(), x);
        }
    }
}
