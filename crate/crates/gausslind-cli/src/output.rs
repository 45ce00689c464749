//! CSV tables with `#` header comments and shortest round-trip numbers.

use crate::failure::CliError;
use std::fmt::Write as _;
use std::path::Path;

/// A rectangular table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names.
    pub columns: Vec<String>,
    /// Rows, each with one cell per column.
    pub rows: Vec<Vec<String>>,
    /// Extra `#` comment lines written after the standard header.
    pub notes: Vec<String>,
}

impl Table {
    /// Empty table with the given columns.
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    /// Appends a row; panics if its width does not match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Renders the table with the standard header.
    pub fn render(&self, mode: &str, config_hash: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# gausslind {}", crate::VERSION);
        let _ = writeln!(s, "# config_sha256: {config_hash}");
        let _ = writeln!(s, "# mode: {mode}");
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    /// Writes the rendered table to `path`, creating parent directories.
    ///
    /// # Errors
    ///
    /// [`CliError::Output`] on I/O failure.
    pub fn write(&self, path: &Path, mode: &str, config_hash: &str) -> Result<(), CliError> {
        let fail = |e: std::io::Error| CliError::Output { path: path.display().to_string(), message: e.to_string() };
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(fail)?;
            }
        }
        std::fs::write(path, self.render(mode, config_hash)).map_err(fail)
    }
}

/// Shortest decimal representation that parses back to the same double.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
