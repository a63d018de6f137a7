use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A finished command: the JSON payload plus the text and CSV renderings.
pub struct Report {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub params: Value,
    pub result: Value,
    pub text: String,
    pub csv: Csv,
}

#[derive(Default)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| (*s).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Round-trip representation, so CSV cells parse back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({
                    "tool": "siglap",
                    "version": env!("CARGO_PKG_VERSION"),
                    "command": self.command,
                    "seed": self.seed,
                    "params": self.params,
                    "result": self.result,
                });
                serde_json::to_string_pretty(&doc).expect("json") + "\n"
            }
            Format::Csv => self.csv.render(),
            Format::Text => {
                let mut out = String::new();
                let _ = write!(out, "siglap {} {}", env!("CARGO_PKG_VERSION"), self.command);
                if let Some(s) = self.seed {
                    let _ = write!(out, " (seed {s})");
                }
                out.push('\n');
                out.push_str(&self.text);
                if !out.ends_with('\n') {
                    out.push('\n');
                }
                out
            }
        }
    }
}
