use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::{config_error, Model};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved configuration of one run, as written into output headers.
#[derive(Serialize)]
pub struct Resolved<'a, S: Serialize> {
    pub command: &'a str,
    pub model: &'a Model,
    pub options: &'a S,
}

impl<S: Serialize> Resolved<'_, S> {
    pub fn header(&self) -> String {
        let mut out = format!("# largerho {VERSION}\n# seed = {}\n", self.model.seed);
        let body = toml::to_string(self).unwrap_or_default();
        for line in body.lines().filter(|l| !l.is_empty()) {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({ "version": VERSION, "config": self })
    }
}

/// `path` or standard output.
pub fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| config_error(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// 15 significant digits.
pub fn g(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(g).unwrap_or_default()
}

pub fn row(fields: &[String]) -> String {
    fields.join(",")
}
