//! Experiment configuration: TOML file with CLI overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{SizeSchedule, SyntheticSpec};
use crate::error::{Error, Result};
use crate::features::FeatureConfig;
use crate::learners::{Algorithm, Hyperparams};
use crate::tradeoff::TimeBasis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticConfig>,
}

/// Synthetic-corpus section; the generator seed defaults to the global
/// experiment seed when not set explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_classes: usize,
    pub vocab_per_class: usize,
    #[serde(default)]
    pub shared_vocab: usize,
    pub signal_prob: f64,
    pub doc_len_range: (usize, usize),
    pub target_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SyntheticConfig {
    pub fn to_spec(&self, global_seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            num_classes: self.num_classes,
            vocab_per_class: self.vocab_per_class,
            shared_vocab: self.shared_vocab,
            signal_prob: self.signal_prob,
            doc_len_range: self.doc_len_range,
            target_bytes: self.target_bytes,
            seed: self.seed.unwrap_or(global_seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holdout: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kfold: Option<usize>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: String,
    pub corpus: CorpusSource,
    pub algorithms: Vec<Hyperparams>,
    pub sizes_mb: Vec<f64>,
    pub eval: EvalConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub time_basis: TimeBasis,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// parallel cell execution trades timing fidelity for throughput
    #[serde(default)]
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig =
            toml::from_str(&raw).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.corpus.path, &self.corpus.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "corpus must set exactly one of path or synthetic, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidConfig("corpus must set path or synthetic".into()))
            }
            _ => {}
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("algorithms must be non-empty".into()));
        }
        let mut tags: Vec<Algorithm> = self.algorithms.iter().map(|h| h.algorithm).collect();
        tags.sort();
        tags.dedup();
        if tags.len() != self.algorithms.len() {
            return Err(Error::InvalidConfig("duplicate algorithm entries".into()));
        }
        SizeSchedule::new(self.sizes_mb.clone())?;
        if self.eval.holdout.is_none() && self.eval.kfold.is_none() {
            return Err(Error::InvalidConfig("eval must enable holdout and/or kfold".into()));
        }
        if let Some(f) = self.eval.holdout {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig("holdout fraction must be in (0,1)".into()));
            }
        }
        if let Some(k) = self.eval.kfold {
            if k < 2 {
                return Err(Error::InvalidConfig("kfold k must be >= 2".into()));
            }
        }
        if self.features.max_features == 0 || self.features.min_df == 0 {
            return Err(Error::InvalidConfig("max_features and min_df must be >= 1".into()));
        }
        Ok(())
    }

    pub fn schedule(&self) -> SizeSchedule {
        SizeSchedule::new(self.sizes_mb.clone()).expect("validated")
    }
}
