//! Report envelope and rendering.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use qspec::report::{to_json, Table};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub duration_seconds: f64,
}

/// A finished subcommand: JSON payload and its CSV flattening.
pub struct Output {
    pub result: Value,
    pub table: Table,
}

#[derive(Serialize)]
struct Envelope<'a> {
    manifest: &'a Manifest,
    result: &'a Value,
}

pub fn render(manifest: &Manifest, out: &Output, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => {
            let mut s = to_json(&Envelope {
                manifest,
                result: &out.result,
            })?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::new();
            for line in to_json(manifest)?.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
            s.push_str(&out.table.to_csv());
            s
        }
    })
}

pub fn write(text: &str, path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
