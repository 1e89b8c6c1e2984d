//! Run configuration file, JSON with defaults for everything but the
//! corpus path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use regevo_core::engine::GpConfig;
use regevo_core::hybrid::HybridConfig;

use crate::CliError;

/// Which categories a run covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategorySelection {
    /// The literal string `"all"`.
    All(AllMarker),
    List(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllMarker {
    #[serde(rename = "all")]
    All,
}

impl Default for CategorySelection {
    fn default() -> Self {
        CategorySelection::All(AllMarker::All)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// JSONL corpus path. The only required field.
    pub corpus: PathBuf,
    pub categories: CategorySelection,
    /// Master seed; per-category engine seeds and the split seed derive
    /// from it.
    pub seed: u64,
    /// Fraction of each label group that goes to the training side.
    pub split_ratio: f64,
    /// Average-word-frequency threshold of feature selection.
    pub feature_threshold: f64,
    pub output_dir: PathBuf,
    /// Whether the tokenizer lowercases.
    pub lowercase: bool,
    pub gp: GpConfig,
    pub hybrid: HybridConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: PathBuf::new(),
            categories: CategorySelection::default(),
            seed: 0,
            split_ratio: 0.8,
            feature_threshold: 0.01,
            output_dir: PathBuf::from("out"),
            lowercase: true,
            gp: GpConfig::default(),
            hybrid: HybridConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.corpus.as_os_str().is_empty() {
            return Err(CliError::usage("config is missing the corpus path"));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(CliError::usage("split_ratio must be inside (0, 1)"));
        }
        if self.feature_threshold < 0.0 {
            return Err(CliError::usage("feature_threshold must be non-negative"));
        }
        // 0 is legal and turns the hybrid into the pure baseline.
        if !(0.0..=1.0).contains(&self.hybrid.confidence_gate) {
            return Err(CliError::usage("confidence_gate must be inside [0, 1]"));
        }
        if self.hybrid.top_k == 0 {
            return Err(CliError::usage("top_k must be at least 1"));
        }
        self.gp
            .validate()
            .map_err(|e| CliError::usage(format!("gp config: {e}")))?;
        Ok(())
    }

    pub fn wants_all_categories(&self) -> bool {
        matches!(self.categories, CategorySelection::All(_))
    }
}

/// FNV-1a over a string, for deriving per-purpose seeds.
fn fnv1a(text: &str) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in text.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Stable seed for one purpose (the split, one category's evolution)
/// derived from the master seed.
pub fn derive_seed(master: u64, purpose: &str) -> u64 {
    splitmix64(master ^ fnv1a(purpose))
}
