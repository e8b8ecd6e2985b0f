//! CSV and JSON emission. Every file starts with `#` provenance lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits; parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Writer {
    dir: PathBuf,
    command: &'static str,
    config: String,
}

impl Writer {
    pub fn new<C: Serialize>(
        dir: &Path,
        command: &'static str,
        config: &C,
    ) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config: serde_json::to_string(config).expect("config serializes"),
        })
    }

    fn header(&self) -> String {
        format!("# ricker {}\n# config: {}\n", self.command, self.config)
    }

    pub fn csv(
        &self,
        name: &str,
        columns: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<PathBuf, CliError> {
        let mut text = self.header();
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            let _ = writeln!(text, "{}", row.join(","));
        }
        self.write(name, &text)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = self.header();
        text.push_str(&serde_json::to_string_pretty(value).expect("report serializes"));
        text.push('\n');
        self.write(name, &text)
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        Ok(path)
    }
}
