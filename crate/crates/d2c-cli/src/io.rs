//! File formats: dataset CSV + ground-truth JSON sidecar, descriptor
//! CSV, versioned model files, report JSON, and score CSVs.
//!
//! Node ids are 1-based in every file (matching the CSV header); the
//! in-memory types use 0-based indices, and the conversion happens only
//! here. Floats are written with Rust's shortest round-trip formatting,
//! so a parse of our own output is bit-exact and reruns are
//! byte-identical.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use d2c_core::dag::Dag;
use d2c_core::data::Dataset;
use d2c_core::descriptors::{DescriptorVector, DESCRIPTOR_LEN, QUANTILE_PROBS};
use d2c_core::experiment::{DescriptorSettings, EvalReport, PairScore};
use d2c_core::forest::ForestModel;

pub const MODEL_FORMAT: &str = "d2c-forest";
pub const MODEL_VERSION: u32 = 1;
pub const META_FORMAT: &str = "d2c-dataset-meta";
pub const META_VERSION: u32 = 1;
pub const DESCRIPTOR_CSV_VERSION: u32 = 1;

/// Dataset observations as CSV: header = 1-based original node ids, one
/// row per sample.
pub fn write_dataset_csv(path: &Path, ds: &Dataset) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = ds.column_ids().iter().map(|id| (id + 1).to_string()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in 0..ds.n_rows() {
        for (pos, _) in ds.column_ids().iter().enumerate() {
            if pos > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", ds.col(pos)[row]));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing dataset CSV {}", path.display()))
}

/// Read a dataset CSV written by [`write_dataset_csv`]. `hidden_ids`
/// come from the sidecar when available.
pub fn read_dataset_csv(path: &Path, hidden_ids: Vec<usize>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("opening dataset CSV {}", path.display()))?;
    let column_ids: Vec<usize> = rdr
        .headers()
        .context("reading CSV header")?
        .iter()
        .map(|h| {
            h.trim()
                .parse::<usize>()
                .ok()
                .and_then(|v| v.checked_sub(1))
                .ok_or_else(|| anyhow!("header entry {h:?} is not a 1-based node id"))
        })
        .collect::<Result<_>>()?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); column_ids.len()];
    for (line, record) in rdr.records().enumerate() {
        let record = record.with_context(|| format!("reading CSV row {}", line + 2))?;
        if record.len() != column_ids.len() {
            bail!("row {} has {} fields, expected {}", line + 2, record.len(), column_ids.len());
        }
        for (pos, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .with_context(|| format!("row {}, column {}: bad float {field:?}", line + 2, pos + 1))?;
            columns[pos].push(v);
        }
    }
    Dataset::from_parts(columns, column_ids, hidden_ids).map_err(|e| anyhow!("{e}"))
}

/// Ground-truth sidecar: the generating DAG (edges with functional forms
/// and coefficients, noise scales), the seed, and the hidden columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetMeta {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub n_samples: usize,
    pub dag: Dag,
    /// 1-based ids of columns removed from the CSV.
    pub hidden_ids: Vec<usize>,
}

impl DatasetMeta {
    pub fn new(dag: &Dag, ds: &Dataset, n_samples: usize, seed: u64) -> Self {
        DatasetMeta {
            format: META_FORMAT.to_string(),
            version: META_VERSION,
            seed,
            n_samples,
            dag: dag.clone(),
            hidden_ids: ds.hidden_ids().iter().map(|id| id + 1).collect(),
        }
    }

    /// 0-based hidden column ids.
    pub fn hidden_ids_internal(&self) -> Result<Vec<usize>> {
        self.hidden_ids
            .iter()
            .map(|&id| id.checked_sub(1).ok_or_else(|| anyhow!("hidden id 0 is not 1-based")))
            .collect()
    }
}

pub fn write_meta(path: &Path, meta: &DatasetMeta) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing sidecar {}", path.display()))
}

pub fn read_meta(path: &Path) -> Result<DatasetMeta> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading sidecar {}", path.display()))?;
    let meta: DatasetMeta = serde_json::from_str(&text)
        .with_context(|| format!("parsing sidecar {}", path.display()))?;
    if meta.format != META_FORMAT || meta.version != META_VERSION {
        bail!(
            "unsupported sidecar format {:?} v{} (expected {META_FORMAT} v{META_VERSION})",
            meta.format,
            meta.version
        );
    }
    Ok(meta)
}

/// Versioned model file: a self-describing envelope around the forest
/// plus the descriptor settings it was trained with, so prediction can
/// rebuild features the same way.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub descriptor: DescriptorSettings,
    pub model: ForestModel,
}

pub fn write_model(path: &Path, model: &ForestModel, descriptor: &DescriptorSettings) -> Result<()> {
    let envelope = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        descriptor: *descriptor,
        model: model.clone(),
    };
    let mut text = serde_json::to_string(&envelope)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing model {}", path.display()))?;
    // round-trip validation: loading must reproduce the exact model
    let back = read_model(path)?;
    if back.model != *model {
        bail!("model round-trip mismatch after writing {}", path.display());
    }
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading model {}", path.display()))?;
    let envelope: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("model file {} is not a valid {MODEL_FORMAT} v{MODEL_VERSION} file", path.display()))?;
    if envelope.format != MODEL_FORMAT {
        bail!("model file {} has format {:?}, expected {MODEL_FORMAT}", path.display(), envelope.format);
    }
    if envelope.version != MODEL_VERSION {
        bail!("model file {} has version {}, expected {MODEL_VERSION}", path.display(), envelope.version);
    }
    Ok(envelope)
}

/// Column names of the descriptor CSV, in feature order.
pub fn descriptor_feature_names() -> Vec<String> {
    let mut names = vec!["I0".to_string(), "I1".to_string(), "I2".to_string()];
    for block in ["Pi", "Pj", "D1fwd", "D1rev", "D2fwd", "D2rev", "D3fwd", "D3rev"] {
        for p in QUANTILE_PROBS {
            names.push(format!("{block}_q{:02}", (p * 100.0).round() as u32));
        }
    }
    debug_assert_eq!(names.len(), DESCRIPTOR_LEN);
    names
}

/// Descriptor matrix CSV: a versioned comment line documenting the
/// layout, then `i,j,label` plus the 43 feature columns. `i`/`j` are
/// written as 1-based node ids.
pub fn write_descriptor_csv(
    path: &Path,
    rows: &[DescriptorVector],
    node_ids: impl Fn(usize, usize) -> (usize, usize),
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# d2c-descriptors v{DESCRIPTOR_CSV_VERSION}: 3 MI terms then 8 populations x 5 quantiles (q10,q25,q50,q75,q90)\n"
    ));
    out.push_str("i,j,label,");
    out.push_str(&descriptor_feature_names().join(","));
    out.push('\n');
    for d in rows {
        let (ni, nj) = node_ids(d.i, d.j);
        out.push_str(&format!("{},{}", ni + 1, nj + 1));
        match d.label {
            Some(true) => out.push_str(",1"),
            Some(false) => out.push_str(",0"),
            None => out.push(','),
        }
        for v in &d.features {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing descriptors {}", path.display()))
}

pub fn write_report_json(path: &Path, report: &EvalReport) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing report {}", path.display()))
}

/// Per-pair scores: `dag,i,j,label,score[,baseline_score]`.
pub fn write_scores_csv(path: &Path, scores: &[PairScore]) -> Result<()> {
    let with_baseline = scores.iter().any(|s| s.baseline_score.is_some());
    let mut out = String::new();
    out.push_str("dag,i,j,label,score");
    if with_baseline {
        out.push_str(",baseline_score");
    }
    out.push('\n');
    for s in scores {
        out.push_str(&format!(
            "{},{},{},{},{}",
            s.dag_index,
            s.node_i + 1,
            s.node_j + 1,
            if s.label { 1 } else { 0 },
            s.score
        ));
        if with_baseline {
            match s.baseline_score {
                Some(b) => out.push_str(&format!(",{b}")),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing scores {}", path.display()))
}

/// BER against training-set size, one row per size: plot-ready.
pub fn write_ber_curve_csv(path: &Path, rows: &[(usize, f64, f64)]) -> Result<()> {
    let mut out = String::from("train_pairs,ber,auprc\n");
    for (pairs, ber, auprc) in rows {
        out.push_str(&format!("{pairs},{ber},{auprc}\n"));
    }
    fs::write(path, out).with_context(|| format!("writing BER curve {}", path.display()))
}

pub fn create_parent_dirs(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    Ok(())
}
