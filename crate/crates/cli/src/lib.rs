//! Command-line front end for the bandit experiments: config resolution,
//! CSV traces, SVG plots and run manifests.

use std::path::PathBuf;

pub mod check;
pub mod config;
pub mod manifest;
pub mod output;
pub mod plot;
pub mod run;

pub use config::{resolve, Resolved, Settings};
pub use manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidKey { key: String, reason: String },
    #[error("malformed config: {0}")]
    ConfigSyntax(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] momab_core::Error),
}

impl CliError {
    pub(crate) fn csv(path: &std::path::Path, e: csv::Error) -> Self {
        CliError::Parse(format!("{}: {e}", path.display()))
    }
}
