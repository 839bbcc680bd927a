//! Machine-readable artifacts: CSV tables and JSON verdicts, each carrying a
//! header with tool version, configuration hash and seed.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const TOOL: &str = "carnot-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CARNOT_LAB_OUT";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Header {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Header { tool: TOOL.into(), version: VERSION.into(), config_hash: config_hash.into(), seed }
    }
}

/// A table with a `#`-prefixed header block and RFC 4180 quoting.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn render(&self, header: &Header) -> Result<String> {
        let mut out = format!(
            "# tool: {} {}\n# config_hash: {}\n# seed: {}\n",
            header.tool, header.version, header.config_hash, header.seed
        );
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }
}

/// Lowercase hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Formats a float for tables; `Display` is the shortest round-trip form.
pub fn cell(x: f64) -> String {
    x.to_string()
}

/// `{"header": .., "result": ..}` with keys in sorted order.
pub fn render_json<S: Serialize>(header: &Header, result: &S) -> Result<String> {
    let value = json!({ "header": header, "result": result });
    // Round-trip through `Value` so every object is a sorted map.
    let value: Value = serde_json::from_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub stem: String,
    pub json: String,
    pub csv: Option<String>,
}

impl Artifacts {
    /// Writes `<stem>.json` and `<stem>.csv` into `dir`, each via a temporary
    /// file and a rename. Returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = vec![write_atomic(dir, &format!("{}.json", self.stem), &self.json)?];
        if let Some(csv) = &self.csv {
            paths.push(write_atomic(dir, &format!("{}.csv", self.stem), csv)?);
        }
        Ok(paths)
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

/// The configured directory, else `$CARNOT_LAB_OUT`, else `out`.
pub fn output_dir(configured: Option<&str>) -> PathBuf {
    configured
        .map(PathBuf::from)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}
