use clap::ValueEnum;
use serde_json::{Map, Value};
use sinkmech::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable summary.
    Text,
    /// Comma-separated table with a header row.
    Csv,
    /// One JSON object per line.
    JsonLines,
}

/// A command's result: a human-readable rendering and the same content as
/// a table for the machine-readable formats.
#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.text.push_str(text.as_ref());
        self.text.push('\n');
    }

    pub fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("writing to memory");
                for row in &self.rows {
                    w.write_record(row.iter().map(plain)).expect("writing to memory");
                }
                String::from_utf8(w.into_inner().expect("flushing to memory")).expect("utf-8 output")
            }
            Format::JsonLines => self
                .rows
                .iter()
                .map(|row| {
                    let object: Map<String, Value> =
                        self.columns.iter().map(|c| c.to_string()).zip(row.iter().cloned()).collect();
                    Value::Object(object).to_string() + "\n"
                })
                .collect(),
        }
    }
}

fn plain(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `p/q (≈decimal)` for exact values, the decimal alone otherwise.
pub fn describe<S: Scalar>(value: &S) -> String {
    let text = value.to_string();
    if S::EXACT && text.contains('/') {
        format!("{text} (≈{:.6})", value.to_f64())
    } else {
        text
    }
}

pub fn exact_cell<S: Scalar>(value: &S) -> Value {
    Value::String(value.to_string())
}

pub fn decimal_cell<S: Scalar>(value: &S) -> Value {
    serde_json::Number::from_f64(value.to_f64()).map_or(Value::Null, Value::Number)
}

pub fn row_text<S: Scalar>(row: &[S]) -> String {
    row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
