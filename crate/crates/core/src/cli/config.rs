use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Contents of the `--config` file. Every key is optional and unknown keys
/// are rejected; command-line flags take precedence.
///
/// ```toml
/// [download]
/// user_agent = "Jane Doe jane@example.com"
/// start_year = 2018
/// end_year = 2020
///
/// [train]
/// dim = 100
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub download: DownloadSection,
    pub extract: ExtractSection,
    pub stats: StatsSection,
    pub train: TrainSection,
    pub nn: NnSection,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DownloadSection {
    pub start_year: Option<i32>,
    pub end_year: Option<i32>,
    pub ciks: Option<Vec<u64>>,
    pub form_types: Option<Vec<String>>,
    pub include_variants: Option<bool>,
    pub rate_limit: Option<u32>,
    pub user_agent: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub archive_base_url: Option<String>,
    pub replay_dir: Option<PathBuf>,
    pub retry_attempts: Option<u32>,
    pub retry_backoff_ms: Option<u64>,
    pub timeout_secs: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractSection {
    pub input_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub items: Option<Vec<String>>,
    pub strip_page_numbers: Option<bool>,
    pub strip_repeated_lines: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsSection {
    pub input_dir: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub input_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dim: Option<usize>,
    pub vocab: Option<usize>,
    pub min_count: Option<u64>,
    pub window: Option<usize>,
    pub negatives: Option<usize>,
    pub epochs: Option<usize>,
    pub initial_lr: Option<f64>,
    pub subsample_t: Option<f64>,
    pub seed: Option<u64>,
    pub deterministic: Option<bool>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NnSection {
    pub vectors: Option<PathBuf>,
    pub k: Option<usize>,
    pub exclude_inflections: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub vectors: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub folds: Option<usize>,
    pub seed: Option<u64>,
    pub report: Option<PathBuf>,
    pub c: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
}

impl PipelineConfig {
    pub fn parse(text: &str, path: &Path) -> Result<PipelineConfig, ConfigFileError> {
        toml::from_str(text).map_err(|source| ConfigFileError::Parse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io { path: path.to_path_buf(), source })?;
        PipelineConfig::parse(&text, path)
    }
}
