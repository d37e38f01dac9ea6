//! Rendering of command results: CSV with a `#` provenance header, JSON, and
//! optional gnuplot scripts. Files are replaced atomically.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format `{other}`; use csv or json"))),
        }
    }
}

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The resolved configuration, after merging file and flags.
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence_id: Option<String>,
}

impl Provenance {
    pub fn new(command: &str, config: &impl Serialize) -> Self {
        Provenance {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            spectrum_id: None,
            sequence_id: None,
        }
    }

    pub fn spectrum(mut self, id: impl Into<String>) -> Self {
        self.spectrum_id = Some(id.into());
        self
    }

    pub fn sequence(mut self, id: impl Into<String>) -> Self {
        self.sequence_id = Some(id.into());
        self
    }
}

/// A rectangular result with free-text notes for the CSV header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A line plot of two table columns.
#[derive(Debug, Clone)]
pub struct Plot {
    pub x: usize,
    pub y: usize,
    pub xlabel: String,
    pub ylabel: String,
    pub logscale: bool,
    /// Horizontal reference line, drawn dashed.
    pub reference: Option<(f64, String)>,
}

/// What a command produced; the renderer picks CSV or JSON.
#[derive(Debug, Clone)]
pub struct Report {
    pub provenance: Provenance,
    pub table: Table,
    pub json: Value,
    pub plot: Option<Plot>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => {
                let doc = json!({ "provenance": self.provenance, "result": self.json });
                let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
                s.push('\n');
                s
            }
        }
    }

    fn render_csv(&self) -> String {
        let p = &self.provenance;
        let mut s = String::new();
        s.push_str(&format!("# {} {}\n", p.tool, p.version));
        s.push_str(&format!("# command: {}\n", p.command));
        s.push_str(&format!("# config: {}\n", p.config));
        if let Some(id) = &p.spectrum_id {
            s.push_str(&format!("# spectrum: {id}\n"));
        }
        if let Some(id) = &p.sequence_id {
            s.push_str(&format!("# sequence: {id}\n"));
        }
        for n in &self.table.notes {
            s.push_str(&format!("# {n}\n"));
        }
        s.push_str(&self.table.columns.join(","));
        s.push('\n');
        for row in &self.table.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// A gnuplot script plotting `data_path`; None if the command has no plot.
    pub fn gnuplot(&self, data_path: &Path) -> Option<String> {
        let plot = self.plot.as_ref()?;
        let c = &self.table.columns;
        let mut s = String::new();
        s.push_str(&format!("# {} {} {}\n", TOOL, VERSION, self.provenance.command));
        s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n");
        s.push_str(&format!("set xlabel '{}'\nset ylabel '{}'\n", plot.xlabel, plot.ylabel));
        if plot.logscale {
            s.push_str("set logscale xy\n");
        }
        s.push_str(&format!(
            "plot '{}' using {}:{} with linespoints title '{}'",
            data_path.display(),
            plot.x + 1,
            plot.y + 1,
            c[plot.y]
        ));
        if let Some((v, label)) = &plot.reference {
            s.push_str(&format!(", {v} with lines dashtype 2 title '{label}'"));
        }
        s.push('\n');
        Some(s)
    }
}

/// Formats a float with the shortest representation that round-trips.
/// Shortest round-trip decimal; signed zero prints as `0`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

/// Writes `contents` to `path` through a sibling temp file and a rename, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| Error::Io(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e: std::io::Error| Error::Io(format!("writing {}: {e}", path.display()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}
