//! Command config files (JSON). Unknown keys are rejected everywhere;
//! seeds are plain 64-bit unsigned decimals.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use d2c_core::experiment::{DataProtocol, DescriptorSettings, ExperimentConfig, PairProtocol};
use d2c_core::forest::ForestParams;

/// `d2c gen`: simulate one dataset and write it with its ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    #[serde(default)]
    pub data: DataProtocol,
    /// Explicit sample count; omitted means drawn from
    /// `[data.samples_min, data.samples_max]`.
    #[serde(default)]
    pub n_samples: Option<usize>,
    /// 1-based node ids that must never be hidden.
    #[serde(default)]
    pub protected: Vec<usize>,
    pub out_csv: PathBuf,
    pub out_meta: PathBuf,
}

/// `d2c train`: build a training set, fit the forest, persist the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: u64,
    #[serde(default)]
    pub train_data: DataProtocol,
    #[serde(default = "default_train_pairs")]
    pub train_pairs: PairProtocol,
    #[serde(default)]
    pub descriptor: DescriptorSettings,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub shuffle_labels: bool,
    pub model_out: PathBuf,
    /// Optional export of the training descriptor matrix.
    #[serde(default)]
    pub descriptors_out: Option<PathBuf>,
}

fn default_train_pairs() -> PairProtocol {
    PairProtocol { n_dags: 100, pos_per_dag: 4, neg_per_dag: 4 }
}

/// `d2c eval`: the full experiment plus output paths and an optional
/// sweep over training-set sizes (in pairs).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    #[serde(default)]
    pub experiment: ExperimentConfig,
    /// Training-set sizes (total pairs) for the BER curve; omitted means
    /// just the configured size.
    #[serde(default)]
    pub training_sizes: Option<Vec<usize>>,
    pub report_out: PathBuf,
    pub scores_out: PathBuf,
    #[serde(default)]
    pub ber_curve_out: Option<PathBuf>,
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

impl TrainConfig {
    pub fn as_experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            train_data: self.train_data,
            train_pairs: self.train_pairs,
            descriptor: self.descriptor,
            forest: self.forest,
            seed: self.seed,
            shuffle_labels: self.shuffle_labels,
            ..Default::default()
        }
    }
}
