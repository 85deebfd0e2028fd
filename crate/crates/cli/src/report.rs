use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Outcome of one subcommand. Keys are sorted on output, so equal inputs
/// give byte-identical files.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub passed: bool,
    pub result: Value,
    /// Rows for CSV output; falls back to the scalar entries of `result`.
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("command".into(), Value::from(self.command));
                doc.insert("config".into(), self.config.clone());
                doc.insert("passed".into(), Value::from(self.passed));
                doc.insert("result".into(), self.result.clone());
                let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(CliError::output)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                match &self.table {
                    Some(t) => {
                        w.write_record(&t.header).map_err(CliError::output)?;
                        for row in &t.rows {
                            w.write_record(row).map_err(CliError::output)?;
                        }
                    }
                    None => {
                        w.write_record(["key", "value"]).map_err(CliError::output)?;
                        w.write_record(["passed", &self.passed.to_string()]).map_err(CliError::output)?;
                        if let Value::Object(m) = &self.result {
                            for (k, v) in m {
                                if let Some(s) = scalar(v) {
                                    w.write_record([k.as_str(), &s]).map_err(CliError::output)?;
                                }
                            }
                        }
                    }
                }
                w.into_inner().map_err(|e| CliError::output(e.into_error()))
            }
        }
    }

    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render(format)?;
        match path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(p.display().to_string(), e.to_string())),
            None => std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io("stdout".into(), e.to_string())),
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Shortest round-trip text of `x` (scientific when tiny or huge), `inf`
/// for infinity.
pub fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:?}")
    }
}

/// Finite floats as JSON numbers, infinities as `"inf"`.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(num(x))
    }
}
