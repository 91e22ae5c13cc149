use serde_json::Value;

use crate::args::Format;
use crate::commands::{CliError, CliResult};

/// Rows for CSV output.
#[derive(Clone, Debug)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Config(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8 fields"))
    }
}

pub fn render(json: &Value, table: Option<&Table>, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(json).expect("serialisable") + "\n"),
        Format::Csv => table.ok_or_else(|| CliError::Config("no CSV form for this output".into()))?.to_csv(),
    }
}
