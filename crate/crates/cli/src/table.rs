//! Rectangular result tables and their CSV / JSON encodings.

use serde_json::{json, Map, Value as Json};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Flag(bool),
    /// Plain identifier without commas.
    Text(String),
    /// Not converged or not defined.
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Number(x)
        } else {
            Cell::Empty
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::from)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.replace(',', ";"))
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Parameter echo as `(key, value, unit)`.
    pub parameters: Vec<(String, String, String)>,
    pub scalars: Vec<Scalar>,
    pub notes: Vec<String>,
}

impl ResultTable {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        Self {
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: n.to_string(),
                    unit: u.to_string(),
                })
                .collect(),
            rows: Vec::new(),
            parameters: Vec::new(),
            scalars: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_columns(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            parameters: Vec::new(),
            scalars: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn scalar(&mut self, name: &str, value: f64, unit: &str) {
        self.scalars.push(Scalar {
            name: name.into(),
            value,
            unit: unit.into(),
        });
    }

    pub fn echo(&mut self, cfg: &RunConfig) {
        self.parameters = cfg
            .parameters
            .iter()
            .map(|(k, v)| (k.clone(), v.to_string(), cfg.unit(k).to_string()))
            .collect();
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn to_csv(&self, experiment: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# tool: {} {}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        ));
        out.push_str(&format!("# experiment: {experiment}\n"));
        for (k, v, u) in &self.parameters {
            out.push_str(&format!("# param {k}: {v} [{u}]\n"));
        }
        for c in &self.columns {
            out.push_str(&format!("# unit {}: {}\n", c.name, c.unit));
        }
        for s in &self.scalars {
            out.push_str(&format!(
                "# scalar {}: {} [{}]\n",
                s.name,
                number(s.value),
                s.unit
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Number(x) => number(*x),
                    Cell::Flag(b) => b.to_string(),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, experiment: &str) -> String {
        let f = |x: f64| if x.is_finite() { json!(x) } else { Json::Null };
        let mut params = Map::new();
        for (k, v, u) in &self.parameters {
            params.insert(k.clone(), json!({ "value": v, "unit": u }));
        }
        let mut units = Map::new();
        for c in &self.columns {
            units.insert(c.name.clone(), json!(c.unit));
        }
        let mut scalars = Map::new();
        let mut scalar_units = Map::new();
        for s in &self.scalars {
            scalars.insert(s.name.clone(), f(s.value));
            scalar_units.insert(s.name.clone(), json!(s.unit));
        }
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                Json::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Number(x) => f(*x),
                            Cell::Flag(b) => json!(b),
                            Cell::Text(t) => json!(t),
                            Cell::Empty => Json::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "experiment": experiment,
            "parameters": params,
            "columns": self.columns.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
            "units": units,
            "rows": rows,
            "scalars": scalars,
            "scalar_units": scalar_units,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values are serializable");
        s.push('\n');
        s
    }
}

/// 17 significant digits.
fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}
