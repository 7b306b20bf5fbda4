//! Rendering of command results and all-or-nothing file output.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One CSV cell.
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Real)
    }
}

impl From<Option<bool>> for Cell {
    fn from(v: Option<bool>) -> Self {
        v.map_or(Cell::Empty, Cell::Bool)
    }
}

fn render_cell(out: &mut String, cell: &Cell) {
    match cell {
        Cell::Real(v) => write!(out, "{v:.16e}"),
        Cell::Int(v) => write!(out, "{v}"),
        Cell::Text(s) => write!(out, "{s}"),
        Cell::Bool(b) => write!(out, "{b}"),
        Cell::Empty => Ok(()),
    }
    .expect("writing to a String cannot fail");
}

/// Versioned CSV: a `#` comment line, a header row, then one line per row.
pub fn csv(command: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut out = format!("# uncertainty-lab v{SCHEMA_VERSION} {command}\n");
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            render_cell(&mut out, cell);
        }
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s
}

/// Path of the metadata file written next to `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn staging_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(format!(".partial-{}", std::process::id()));
    PathBuf::from(name)
}

/// Writes every `(path, contents)` pair, or none of them: each file is staged
/// next to its target and only renamed into place once all are on disk.
pub fn write_all(files: &[(PathBuf, String)]) -> io::Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    let result = files.iter().try_for_each(|(path, contents)| {
        let tmp = staging_path(path);
        staged.push(tmp.clone());
        fs::write(&tmp, contents)
    });
    let result = result.and_then(|_| {
        files
            .iter()
            .zip(&staged)
            .try_for_each(|((path, _), tmp)| fs::rename(tmp, path))
    });
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

pub fn write_stdout(contents: &str) -> io::Result<()> {
    let mut stdout = io::stdout().lock();
    stdout.write_all(contents.as_bytes())?;
    stdout.flush()
}
