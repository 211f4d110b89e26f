//! Command surface for `subshift-core`: every command reads a [`RunConfig`], writes
//! byte-stable artifacts and reports a pass/fail verdict.

pub mod artifacts;
pub mod commands;
pub mod config;

use serde_json::Value;
use thiserror::Error;

pub use artifacts::{Artifacts, SCHEMA_VERSION};
pub use commands::{run, Command};
pub use config::{Format, Levels, RunConfig, SourceKind};

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or an analysis level beyond what the config allows.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Errors that reject the request itself map to usage errors. The remaining core errors
/// mean a certificate could not be produced, which is a verification failure.
pub(crate) fn classify(e: subshift_core::Error) -> Result<Value, CliError> {
    use subshift_core::Error as E;
    match e {
        E::CertificateFailure { .. }
        | E::InsufficientOccurrences { .. }
        | E::UnknownWord(_)
        | E::NotUniquelyCertified(_) => Ok(serde_json::json!({ "error": e.to_string() })),
        other => Err(CliError::Usage(other.to_string())),
    }
}

/// Verdict of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub pass: bool,
    pub detail: Value,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}
