//! Run manifest: everything needed to replay a run.

use std::path::{Path, PathBuf};

use momab_core::{AlgorithmId, ExperimentConfig, Suite};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Version string of this build, `<crate version>+<git describe>`.
pub const VERSION: &str = env!("MOMAB_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub suite: Suite,
    pub algorithms: Vec<AlgorithmId>,
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub started_at: String,
    pub finished_at: Option<String>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(suite: Suite, algorithms: Vec<AlgorithmId>, config: ExperimentConfig, out_dir: PathBuf) -> Self {
        RunManifest {
            version: VERSION.to_string(),
            suite,
            algorithms,
            config,
            out_dir,
            started_at: now(),
            finished_at: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let m: RunManifest = serde_json::from_str(text).map_err(|e| CliError::ConfigSyntax(e.to_string()))?;
        m.config.validate().map_err(CliError::Core)?;
        if let Some(a) = m.algorithms.iter().find(|a| a.suite() != m.suite) {
            return Err(CliError::InvalidKey {
                key: "algorithms".into(),
                reason: format!("{a} does not belong to the {} suite", m.suite.name()),
            });
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }
}
