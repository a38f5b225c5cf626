//! Configuration input and CSV, JSON and SVG output.

pub mod config;
pub mod svg;
pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::{RunConfig, SCHEMA_VERSION};
pub use svg::{SvgPlot, SVG_WIDTH};
pub use table::{fmt_num, read_csv, Cell, Table};

use crate::{Error, Result};

/// Record of one command run. Every file written through [`OutputDir`] is
/// listed; all fields except `wall_time_s` are deterministic.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: serde_json::Value,
    pub config: Option<serde_json::Value>,
    pub versions: BTreeMap<String, String>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// Output directory that remembers what was written to it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(OutputDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.written
    }

    fn put(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, text)?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(path)
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<PathBuf> {
        self.put(name, &table.to_csv()?)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        self.put(name, &(text + "\n"))
    }

    pub fn svg(&mut self, name: &str, plot: &SvgPlot) -> Result<PathBuf> {
        self.put(name, &plot.render())
    }

    /// Writes the manifest, listing every file so far and itself.
    pub fn finish(mut self, mut manifest: RunManifest) -> Result<PathBuf> {
        manifest.outputs = self.written.clone();
        manifest.outputs.push(MANIFEST_FILE.into());
        self.json(MANIFEST_FILE, &manifest)
    }
}

/// Crate and format versions recorded in manifests.
pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        (env!("CARGO_PKG_NAME").to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("config_schema".to_string(), SCHEMA_VERSION.to_string()),
    ])
}
