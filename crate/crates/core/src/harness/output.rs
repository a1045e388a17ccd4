//! Output files: metadata headers, CSV tables and JSON documents.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped on every output.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, config: &Value, seed: u64) -> Self {
        Meta {
            tool: "entrodyn",
            version: VERSION,
            command: command.to_string(),
            config_hash: config_hash(config),
            seed,
        }
    }

    fn csv_header(&self) -> String {
        format!(
            "# entrodyn {} command={} config_hash={} seed={}\n",
            self.version, self.command, self.config_hash, self.seed
        )
    }
}

/// SHA-256 of the config's canonical JSON (object keys sorted).
pub fn config_hash(config: &Value) -> String {
    let bytes = serde_json::to_vec(config).expect("values always serialize");
    Sha256::digest(&bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Collects written files.
pub struct OutputDir {
    root: PathBuf,
    meta: Meta,
    pub written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn create(root: &Path, meta: Meta) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    /// Writes a CSV file: metadata comment, header row, then `rows`.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut s = self.meta.csv_header();
        s.push_str(&columns.join(","));
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        self.write(name, s)
    }

    /// Writes `{"meta": …, <body fields>}`.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let mut v = serde_json::to_value(body)?;
        let meta = serde_json::to_value(&self.meta)?;
        match v.as_object_mut() {
            Some(obj) => {
                obj.insert("meta".into(), meta);
            }
            None => v = serde_json::json!({ "meta": meta, "data": v }),
        }
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        self.write(name, s)
    }

    fn write(&mut self, name: &str, contents: String) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }
}

/// Formats a float for CSV.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Formats an optional float, empty when absent.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
