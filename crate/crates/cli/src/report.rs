//! Plot-ready output: CSV tables plus one JSON summary per run.
//!
//! Rows are emitted in index order and floats printed with Rust's
//! shortest-round-trip formatting, so a rerun with the same config and seed
//! produces byte-identical CSV. The only run-varying field is the
//! `generated_at_unix` stamp in the JSON header.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub command: String,
    pub seed: u64,
    pub generated_at_unix: u64,
}

impl Header {
    pub fn new(command: &str, seed: u64) -> Self {
        let generated_at_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self { command: command.to_string(), seed, generated_at_unix }
    }
}

pub fn cell(x: f64) -> String {
    format!("{x}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn ensure_outdir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_csv(
    outdir: &Path,
    name: &str,
    headers: &[&str],
    rows: &[Vec<String>],
) -> CliResult<PathBuf> {
    ensure_outdir(outdir)?;
    let path = outdir.join(name);
    let mut buf = Vec::new();
    writeln!(buf, "{}", headers.join(",")).expect("vec write");
    for row in rows {
        writeln!(buf, "{}", row.join(",")).expect("vec write");
    }
    fs::write(&path, buf).map_err(io_err(&path))?;
    Ok(path)
}

pub fn write_json<S: Serialize>(outdir: &Path, name: &str, value: &S) -> CliResult<PathBuf> {
    ensure_outdir(outdir)?;
    let path = outdir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serializing {name}: {e}")))?;
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}
