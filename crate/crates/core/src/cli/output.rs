//! Column-oriented datasets and their CSV and JSON encodings.

use serde::Serialize;
use serde_json::{Map, Value};

use super::args::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Int(Vec<i64>),
    Real(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Int(v) => v.len(),
            ColumnValues::Real(v) => v.len(),
            ColumnValues::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric view, if the column is numeric.
    pub fn as_f64(&self) -> Option<Vec<f64>> {
        match self {
            ColumnValues::Int(v) => Some(v.iter().map(|&x| x as f64).collect()),
            ColumnValues::Real(v) => Some(v.clone()),
            ColumnValues::Text(_) => None,
        }
    }

    /// Text rendering of each cell, as written to CSV.
    pub fn cells(&self) -> Vec<String> {
        match self {
            ColumnValues::Int(v) => v.iter().map(i64::to_string).collect(),
            ColumnValues::Real(v) => v.iter().map(|&x| format_significant(x, 12)).collect(),
            ColumnValues::Text(v) => v.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ColumnValues::Int(v) => Value::from(v.clone()),
            ColumnValues::Real(v) => Value::Array(v.iter().map(|&x| real_to_json(x)).collect()),
            ColumnValues::Text(v) => Value::from(v.clone()),
        }
    }
}

fn real_to_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format_significant(x, 12));
    }
    // Round through the 12-digit text so CSV and JSON carry the same values.
    let rounded: f64 = format_significant(x, 12).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub values: ColumnValues,
}

impl Column {
    pub fn int(name: &str, values: Vec<i64>) -> Self {
        Self {
            name: name.into(),
            values: ColumnValues::Int(values),
        }
    }

    pub fn real(name: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            values: ColumnValues::Real(values),
        }
    }

    pub fn text(name: &str, values: Vec<String>) -> Self {
        Self {
            name: name.into(),
            values: ColumnValues::Text(values),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// θ in degrees against a radial value, mirrored to the full circle.
    Polar,
    Line,
    /// One bar per row, labelled by the x column.
    Bar,
}

/// How a dataset should be drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub x: String,
    pub y: String,
    /// Column whose distinct values become separate curves.
    pub series: Option<String>,
    /// Column whose distinct values become separate panels.
    pub facet: Option<String>,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, x: &str, y: &str) -> Self {
        Self {
            kind,
            x: x.into(),
            y: y.into(),
            series: None,
            facet: None,
            x_label: x.into(),
            y_label: y.into(),
            log_y: false,
        }
    }

    pub fn series(mut self, column: &str) -> Self {
        self.series = Some(column.into());
        self
    }

    pub fn facet(mut self, column: &str) -> Self {
        self.facet = Some(column.into());
        self
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub title: String,
    pub plot: Option<PlotSpec>,
    pub columns: Vec<Column>,
}

impl Dataset {
    pub fn new(title: impl Into<String>, columns: Vec<Column>) -> Self {
        let ds = Self {
            title: title.into(),
            plot: None,
            columns,
        };
        debug_assert!(ds.columns.windows(2).all(|w| w[0].values.len() == w[1].values.len()));
        ds
    }

    pub fn with_plot(mut self, plot: PlotSpec) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&ColumnValues> {
        self.columns.iter().find(|c| c.name == name).map(|c| &c.values)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .expect("writing to memory");
        let cells: Vec<Vec<String>> = self.columns.iter().map(|c| c.values.cells()).collect();
        for row in 0..self.rows() {
            w.write_record(cells.iter().map(|c| c[row].as_str()))
                .expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is UTF-8")
    }

    /// `{"params": <config>, "series": {<column>: [...], ...}}`.
    pub fn to_json(&self, config: &RunConfig) -> String {
        let mut series = Map::new();
        for c in &self.columns {
            series.insert(c.name.clone(), c.values.to_json());
        }
        let mut root = Map::new();
        root.insert(
            "params".into(),
            serde_json::to_value(config).expect("config serializes"),
        );
        root.insert("series".into(), Value::Object(series));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json serializes");
        s.push('\n');
        s
    }
}

/// `%.{digits}g` formatting: shortest of fixed or exponent notation, no
/// trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
