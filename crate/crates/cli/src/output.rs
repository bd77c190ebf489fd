//! File emission: every artifact goes to the output directory, numbers in
//! round-trip-exact form.

use std::path::{Path, PathBuf};

use roc_copula::fitting::format_f64;
use serde::Serialize;

use crate::{CliError, Format};

pub struct Output {
    dir: PathBuf,
    quiet: bool,
}

impl Output {
    pub fn new(dir: &Path, quiet: bool) -> Self {
        Output { dir: dir.to_path_buf(), quiet }
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.say(&format!("wrote {}", path.display()));
        Ok(path)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        self.write(name, &to_json(value)?)
    }

    pub fn say(&self, line: &str) {
        if !self.quiet {
            println!("{line}");
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(format!("JSON encoding: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Comma-separated table with a header row; floats use [`format_f64`].
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|c| c.render()).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Num(v) => format_f64(v),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t,
        }
    }
}

/// Requested formats, or `default` when none were given; rejects formats the
/// command cannot produce.
pub fn formats(requested: &[Format], default: &[Format], supported: &[Format], command: &str) -> Result<Vec<Format>, CliError> {
    let chosen = if requested.is_empty() { default.to_vec() } else { requested.to_vec() };
    if let Some(f) = chosen.iter().find(|f| !supported.contains(f)) {
        return Err(CliError::Validation(format!("{command} cannot write {f:?} output")));
    }
    let mut out = Vec::new();
    for f in chosen {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}
