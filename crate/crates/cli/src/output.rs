//! CSV and JSON emission. CSV goes to the configured path or stdout; JSON is
//! written only when a path is configured and always carries the run metadata.

use std::fs::File;
use std::io::{self, Write};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn emit_csv(cfg: &RunConfig, table: &Table) -> Result<()> {
    match &cfg.csv {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write_to(f).with_context(|| format!("writing {}", path.display()))
        }
        None => table.write_to(io::stdout().lock()),
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

pub fn emit_json<T: Serialize>(cfg: &RunConfig, command: &str, result: &T) -> Result<()> {
    let Some(path) = &cfg.json else { return Ok(()) };
    let doc = Document {
        tool: "hecke",
        version: env!("CARGO_PKG_VERSION"),
        library_version: padic_hecke::VERSION,
        command,
        config: cfg,
        result,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
