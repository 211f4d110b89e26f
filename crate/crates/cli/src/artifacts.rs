use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

/// Writes artifacts into the output directory, honouring the configured formats.
#[derive(Debug, Clone)]
pub struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
    source: String,
}

impl Artifacts {
    pub fn new(config: &RunConfig) -> Self {
        Self { dir: config.out_dir.clone(), formats: config.formats.clone(), source: config.source_label() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&self, name: &str, text: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|source| CliError::Io { path: self.dir.display().to_string(), source })?;
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Ok(path)
    }

    /// JSON document with the versioned header around `data`.
    pub fn document(&self, command: &str, pass: bool, data: Value) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "source": self.source,
            "verdict": if pass { "pass" } else { "fail" },
            "data": data,
        })
    }

    pub fn json(&self, name: &str, command: &str, pass: bool, data: Value) -> Result<(), CliError> {
        if self.formats.contains(&Format::Json) {
            let doc = self.document(command, pass, data);
            let mut text = serde_json::to_string_pretty(&doc).expect("json values serialize");
            text.push('\n');
            self.write(&format!("{name}.json"), &text)?;
        }
        Ok(())
    }

    pub fn csv(&self, name: &str, text: &str) -> Result<(), CliError> {
        if self.formats.contains(&Format::Csv) {
            self.write(&format!("{name}.csv"), text)?;
        }
        Ok(())
    }

    pub fn dot(&self, name: &str, text: &str) -> Result<(), CliError> {
        if self.formats.contains(&Format::Dot) {
            self.write(&format!("{name}.dot"), text)?;
        }
        Ok(())
    }

    pub fn text(&self, name: &str, text: &str) -> Result<(), CliError> {
        self.write(name, text).map(|_| ())
    }
}
