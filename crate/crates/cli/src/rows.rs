//! Machine-readable result rows shared by every sweep command.
//!
//! CSV uses the fixed header `sweep_value,quantity,method,value,error_bound`
//! with CRLF record separators per RFC 4180; JSON is an array of objects with
//! the same field names. Floats are rendered with the shortest
//! round-trippable representation, so identical runs emit identical bytes.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub quantity: String,
    pub method: String,
    pub value: f64,
    pub error_bound: f64,
}

impl ResultRow {
    pub fn new(
        sweep_value: f64,
        quantity: impl Into<String>,
        method: impl Into<String>,
        value: f64,
        error_bound: f64,
    ) -> Self {
        Self {
            sweep_value,
            quantity: quantity.into(),
            method: method.into(),
            value,
            error_bound,
        }
    }
}

/// Output encoding selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn write_rows(out: &mut dyn Write, rows: &[ResultRow], format: OutputFormat) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            write!(out, "sweep_value,quantity,method,value,error_bound\r\n")?;
            for row in rows {
                write!(
                    out,
                    "{},{},{},{},{}\r\n",
                    row.sweep_value, row.quantity, row.method, row.value, row.error_bound
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    out.flush()
}
