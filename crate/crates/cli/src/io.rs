use std::fs;
use std::path::Path;

use oapoly::canon::canonicalize;
use oapoly::Error;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::{Cli, Format};

/// A report with an optional flat table for CSV output.
pub struct Body {
    pub json: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Output {
    pub body: Body,
    pub pass: bool,
}

pub struct CliError {
    pub code: u8,
    pub message: String,
    pub report: Option<Body>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
            report: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::VerificationFailure { .. } | Error::HomogeneityViolation { .. } => 1,
            _ => 2,
        };
        let report = (code == 1).then(|| Body {
            json: serde_json::json!({ "error": e.to_string(), "pass": false }),
            table: None,
        });
        Self {
            code,
            message: e.to_string(),
            report,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn render(cli: &Cli, body: &Body) -> Result<String, String> {
    match cli.format {
        Format::Json => Ok(canonicalize(&body.json)),
        Format::Csv => {
            let table = body
                .table
                .as_ref()
                .ok_or_else(|| "this command has no tabular output; use --format json".to_string())?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

pub fn emit(cli: &Cli, body: &Body) -> Result<(), String> {
    let text = render(cli, body)?;
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
