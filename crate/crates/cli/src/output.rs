//! Output documents. Values stay in cgs until they are written here.

use blackbody::{RateResult, Unit};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    Gaussian,
    Si,
}

impl UnitSystem {
    pub fn factor(self, unit: Unit) -> f64 {
        match self {
            UnitSystem::Gaussian => 1.0,
            UnitSystem::Si => unit.si_factor(),
        }
    }

    pub fn symbol(self, unit: Unit) -> &'static str {
        match self {
            UnitSystem::Gaussian => unit.gaussian_symbol(),
            UnitSystem::Si => unit.si_symbol(),
        }
    }

    /// An input-side cgs number in the output system.
    pub fn plain(self, value: f64, unit: Unit) -> PlainQuantity {
        PlainQuantity {
            value: value * self.factor(unit),
            unit: self.symbol(unit),
        }
    }
}

/// A parameter echoed back, with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlainQuantity {
    pub value: f64,
    pub unit: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheckOut {
    pub value: f64,
    pub method: &'static str,
    pub rel_diff: f64,
}

/// A computed number as emitted: value, unit, method, err_estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: &'static str,
    pub method: &'static str,
    pub err_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheckOut>,
}

impl Quantity {
    pub fn from_rate(r: &RateResult, units: UnitSystem) -> Self {
        let f = units.factor(r.unit);
        Quantity {
            value: r.value * f,
            unit: units.symbol(r.unit),
            method: r.method.as_str(),
            err_estimate: r.err_estimate * f,
            cross_check: r.cross_check.map(|c| CrossCheckOut {
                value: c.value * f,
                method: c.method.as_str(),
                rel_diff: c.rel_diff,
            }),
        }
    }

    /// Dimensionless quantity with a given method.
    pub fn scalar(value: f64, err_estimate: f64, method: &'static str) -> Self {
        Quantity {
            value,
            unit: "1",
            method,
            err_estimate,
            cross_check: None,
        }
    }
}

/// Envelope shared by every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub command: &'static str,
    pub version: &'static str,
    pub units: UnitSystem,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Value>,
    pub parameters: Value,
    pub results: Vec<Value>,
}

impl Document {
    pub fn new(command: &'static str, units: UnitSystem) -> Self {
        Document {
            command,
            version: env!("CARGO_PKG_VERSION"),
            units,
            model: None,
            parameters: Value::Object(Default::default()),
            results: Vec::new(),
        }
    }
}

/// Rows for CSV, headers fixed per command.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Table {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| escape(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest round-trip representation, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// value, unit, method, err_estimate as CSV cells.
pub fn quantity_cells(q: &Quantity) -> Vec<String> {
    vec![num(q.value), q.unit.to_string(), q.method.to_string(), num(q.err_estimate)]
}

pub enum Emitted {
    Json(Document),
    Csv(Table),
    Text(String),
}

impl Emitted {
    pub fn render(&self) -> String {
        match self {
            Emitted::Json(doc) => {
                let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
                s.push('\n');
                s
            }
            Emitted::Csv(t) => t.render(),
            Emitted::Text(s) => s.clone(),
        }
    }
}
