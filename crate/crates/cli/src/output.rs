use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

pub const UNITS: &str = "hbar = 2m = 1; energies E = k^2, lengths in the same units";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Numbers in CSV output carry 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Result of a subcommand in both output formats.
pub struct Report {
    pub csv: String,
    pub json: Value,
    /// False makes the process exit with status 1.
    pub passed: bool,
}

impl Report {
    pub fn new(csv: String, mut json: Value) -> Self {
        if let Value::Object(map) = &mut json {
            map.insert("units".into(), json!(UNITS));
        }
        Report { csv, json, passed: true }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report is valid JSON");
                s.push('\n');
                s
            }
        }
    }
}

/// CSV text with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv { text: format!("{}\n", header.join(",")) }
    }

    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Writes to a temporary file next to `path` and renames it into place,
/// or prints to standard output.
pub fn write_atomically(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
        Some(p) => {
            let mut tmp = p.as_os_str().to_owned();
            tmp.push(".tmp");
            std::fs::write(&tmp, text)?;
            std::fs::rename(&tmp, p)
        }
    }
}
