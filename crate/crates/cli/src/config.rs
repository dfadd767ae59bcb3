//! Experiment configuration read from JSON. Command-line flags override it.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<String>,
    pub formula: Option<String>,
    pub theory: Option<String>,
    pub var: Option<String>,
    pub params: Option<String>,
    pub check_models: Option<Vec<String>>,
    pub kind: Option<String>,
    pub depth: Option<usize>,
    pub sweep: Option<String>,
    pub nmax: Option<u32>,
    pub seed: Option<u64>,
    pub size: Option<usize>,
    pub out: Option<PathBuf>,
    pub budget: Option<usize>,
    pub json: Option<bool>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// The flag when given, else the config value.
pub fn pick<T: Clone>(flag: &Option<T>, cfg: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| cfg.clone())
}
