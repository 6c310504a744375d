//! The optional `dsrev.toml` settings file.
//!
//! ```toml
//! [appropriateness]
//! high_threshold = 5
//!
//! [appropriateness.row_map]
//! architecture = "framework"
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::evaluation::{DistributionRow, EvalConfig};
use crate::model::ArtifactType;

pub const CONFIG_FILE: &str = "dsrev.toml";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse {CONFIG_FILE}: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown artifact type {0:?} in appropriateness.row_map")]
    UnknownArtifactType(String),
    #[error("unknown distribution row {0:?} in appropriateness.row_map")]
    UnknownRow(String),
}

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    appropriateness: AppropriatenessSection,
}

#[derive(Debug, Default, Deserialize)]
struct AppropriatenessSection {
    high_threshold: Option<u32>,
    #[serde(default)]
    row_map: BTreeMap<String, String>,
}

/// Parse settings text into an [`EvalConfig`], starting from the defaults.
pub fn parse_config(text: &str) -> Result<EvalConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    let mut config = EvalConfig::default();
    if let Some(threshold) = file.appropriateness.high_threshold {
        config.high_threshold = threshold;
    }
    for (artifact_text, row_text) in &file.appropriateness.row_map {
        let artifact = ArtifactType::parse(artifact_text)
            .ok_or_else(|| ConfigError::UnknownArtifactType(artifact_text.clone()))?;
        let row = DistributionRow::parse(row_text)
            .ok_or_else(|| ConfigError::UnknownRow(row_text.clone()))?;
        config.row_map.insert(artifact, row);
    }
    Ok(config)
}
