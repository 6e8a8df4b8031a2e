//! Report envelope, failure records and CSV/JSON writers.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use zonobal::Config;

use crate::args::Format;

pub const SCHEMA: u32 = 1;

/// A property that did not hold, or a run that errored on a valid config.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub command: String,
    pub instance_id: String,
    pub seed: u64,
    pub property: String,
    pub detail: String,
}

/// Table form of the reports; every cell is already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything one subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub reports: Vec<Value>,
    /// Per-report extras that are not part of the report record itself.
    pub details: Vec<Value>,
    pub table: Table,
    pub failures: Vec<Failure>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    seeds: &'a [u64],
    config: &'a Config,
    reports: &'a [Value],
    #[serde(skip_serializing_if = "<[Value]>::is_empty")]
    details: &'a [Value],
    failures: &'a [Failure],
    passed: bool,
}

/// Shortest round-trip decimal, so identical values print identically.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

pub fn render(
    command: &str,
    seeds: &[u64],
    cfg: &Config,
    format: Format,
    out: &Outcome,
) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                command,
                seeds,
                config: cfg,
                reports: &out.reports,
                details: &out.details,
                failures: &out.failures,
                passed: out.failures.is_empty(),
            };
            let mut text = serde_json::to_vec_pretty(&env).map_err(|e| e.to_string())?;
            text.push(b'\n');
            Ok(text)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.table.header)
                .map_err(|e| e.to_string())?;
            for row in &out.table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

/// Failure records go to stderr as JSON lines whatever the output format.
pub fn report_failures(failures: &[Failure]) {
    let mut err = std::io::stderr().lock();
    for f in failures {
        if let Ok(line) = serde_json::to_string(f) {
            let _ = writeln!(err, "{line}");
        }
    }
}
