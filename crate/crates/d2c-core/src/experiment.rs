//! Train/test protocol over independent DAG populations.
//!
//! Training and test sets are built from disjoint seeded DAG streams:
//! per-DAG substreams are keyed by `(seed, purpose, dag_index)`, so any
//! DAG's rows can be computed independently (and in parallel) while the
//! assembled results stay bit-identical to a serial run. The serial
//! drivers here are the reference; `d2c-cli` layers rayon on top of the
//! same per-DAG functions.

use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dag::{sample_dag, Dag, DagGenConfig, DepType, NodeCount};
use crate::data::{hide_variables, sample_pairs, simulate, Dataset, LabeledPair};
use crate::descriptors::{compute_descriptor, DescriptorVector};
use crate::error::{Error, Result};
use crate::estimator::EstimatorConfig;
use crate::forest::{train_forest, ForestModel, ForestParams, TrainingSet};
use crate::linalg;
use crate::math;
use crate::mb::{default_blanket_size, mb_minus, rank_features, MbFilter};
use crate::metrics::{auprc, Confusion};
use crate::rng::{self, tag};

/// Forest scores strictly above this threshold predict a causal link.
pub const SCORE_THRESHOLD: f64 = 0.5;

const MAX_DAG_ATTEMPTS: u64 = 16;

/// How one population of DAGs and their datasets is generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataProtocol {
    pub nodes: NodeCount,
    pub dep: DepType,
    pub max_parents: usize,
    pub samples_min: usize,
    pub samples_max: usize,
    pub hide_fraction: f64,
}

impl Default for DataProtocol {
    fn default() -> Self {
        DataProtocol {
            nodes: NodeCount::Small,
            dep: DepType::Linear,
            max_parents: 3,
            samples_min: 100,
            samples_max: 500,
            hide_fraction: 0.05,
        }
    }
}

/// How many labeled pairs are drawn per DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairProtocol {
    pub n_dags: usize,
    pub pos_per_dag: usize,
    pub neg_per_dag: usize,
}

impl PairProtocol {
    pub fn pairs_per_dag(&self) -> usize {
        self.pos_per_dag + self.neg_per_dag
    }

    pub fn total_pairs(&self) -> usize {
        self.n_dags * self.pairs_per_dag()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescriptorSettings {
    /// Requested blanket size; `None` means min(10, columns - 2).
    pub k: Option<usize>,
    pub filter: MbFilter,
    pub estimator: EstimatorConfig,
}

impl Default for DescriptorSettings {
    fn default() -> Self {
        DescriptorSettings { k: None, filter: MbFilter::Mi, estimator: EstimatorConfig::default() }
    }
}

/// Full experiment description; the config echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub train_data: DataProtocol,
    pub train_pairs: PairProtocol,
    pub test_data: DataProtocol,
    pub test_pairs: PairProtocol,
    pub descriptor: DescriptorSettings,
    pub forest: ForestParams,
    pub seed: u64,
    /// Destroys label-descriptor association in training (control runs).
    pub shuffle_labels: bool,
    /// Also score test pairs with the partial-correlation baseline.
    pub with_baseline: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train_data: DataProtocol::default(),
            train_pairs: PairProtocol { n_dags: 100, pos_per_dag: 4, neg_per_dag: 4 },
            test_data: DataProtocol::default(),
            test_pairs: PairProtocol { n_dags: 50, pos_per_dag: 4, neg_per_dag: 6 },
            descriptor: DescriptorSettings::default(),
            forest: ForestParams::default(),
            seed: 0,
            shuffle_labels: false,
            with_baseline: false,
        }
    }
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::InsufficientPairs { .. } | Error::NonFinite(_))
}

/// Per-DAG sample count, drawn from the protocol's interval via the
/// DAG's own substream.
pub fn sample_count_for(data: &DataProtocol, dag_seed: u64) -> usize {
    rng::stream(dag_seed, &[tag::SAMPLE_COUNT]).gen_range(data.samples_min..=data.samples_max)
}

/// One DAG with its (partially hidden) dataset and labeled pairs,
/// resampling DAGs that cannot supply the requested pairs.
fn generate_instance(
    data: &DataProtocol,
    purpose: u64,
    dag_index: usize,
    pos: usize,
    neg: usize,
    seed: u64,
) -> Result<(Dag, Dataset, Vec<LabeledPair>)> {
    let gen_cfg =
        DagGenConfig { nodes: data.nodes, max_parents: data.max_parents, dep: data.dep };
    let mut last = Error::Config("no DAG generation attempt made".to_string());
    for attempt in 0..MAX_DAG_ATTEMPTS {
        let dag_seed = rng::derive(seed, &[purpose, dag_index as u64, attempt]);
        let result = (|| {
            let dag = sample_dag(&gen_cfg, dag_seed)?;
            let n = sample_count_for(data, dag_seed);
            let full = simulate(&dag, n, dag_seed)?;
            let ds = hide_variables(&full, data.hide_fraction, &[], dag_seed)?;
            let pairs = sample_pairs(&dag, &ds, pos, neg, dag_seed)?;
            Ok((dag, ds, pairs))
        })();
        match result {
            Ok(v) => return Ok(v),
            Err(e) if retryable(&e) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn rows_for_instance(
    ds: &Dataset,
    pairs: &[LabeledPair],
    desc: &DescriptorSettings,
) -> Result<Vec<DescriptorVector>> {
    let k = desc.k.unwrap_or_else(|| default_blanket_size(ds.n_cols()));
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        let mut d = compute_descriptor(ds, p.i, p.j, k, desc.filter, &desc.estimator)?;
        d.label = Some(p.label);
        rows.push(d);
    }
    Ok(rows)
}

/// Labeled descriptor rows for one training DAG. Pure in
/// `(cfg, dag_index)`; training-set assembly concatenates these in index
/// order.
pub fn training_rows_for_dag(cfg: &ExperimentConfig, dag_index: usize) -> Result<Vec<DescriptorVector>> {
    let (_, ds, pairs) = generate_instance(
        &cfg.train_data,
        tag::TRAIN_DAG,
        dag_index,
        cfg.train_pairs.pos_per_dag,
        cfg.train_pairs.neg_per_dag,
        cfg.seed,
    )?;
    rows_for_instance(&ds, &pairs, &cfg.descriptor)
}

/// Flatten per-DAG rows (in DAG index order) into a training set,
/// applying the label shuffle when configured.
pub fn assemble_training_set(
    cfg: &ExperimentConfig,
    per_dag: Vec<Vec<DescriptorVector>>,
) -> Result<TrainingSet> {
    let mut rows: Vec<DescriptorVector> = per_dag.into_iter().flatten().collect();
    if cfg.shuffle_labels {
        let mut labels: Vec<Option<bool>> = rows.iter().map(|r| r.label).collect();
        let mut r = rng::stream(cfg.seed, &[tag::SHUFFLE]);
        for i in (1..labels.len()).rev() {
            let j = r.gen_range(0..=i);
            labels.swap(i, j);
        }
        for (row, label) in rows.iter_mut().zip(labels) {
            row.label = label;
        }
    }
    TrainingSet::from_descriptors(rows)
}

/// Serial reference for training-set construction.
pub fn build_training_set(cfg: &ExperimentConfig) -> Result<TrainingSet> {
    let per_dag: Result<Vec<_>> =
        (0..cfg.train_pairs.n_dags).map(|d| training_rows_for_dag(cfg, d)).collect();
    assemble_training_set(cfg, per_dag?)
}

/// A test pair with its descriptor and optional baseline score; node
/// indices are original DAG node ids (not column positions).
#[derive(Debug, Clone, PartialEq)]
pub struct TestPairRecord {
    pub dag_index: usize,
    pub node_i: usize,
    pub node_j: usize,
    pub label: bool,
    pub descriptor: DescriptorVector,
    pub baseline_score: Option<f64>,
}

/// Test records for one test DAG. Pure in `(cfg, dag_index)`.
pub fn test_records_for_dag(cfg: &ExperimentConfig, dag_index: usize) -> Result<Vec<TestPairRecord>> {
    let (_, ds, pairs) = generate_instance(
        &cfg.test_data,
        tag::TEST_DAG,
        dag_index,
        cfg.test_pairs.pos_per_dag,
        cfg.test_pairs.neg_per_dag,
        cfg.seed,
    )?;
    let rows = rows_for_instance(&ds, &pairs, &cfg.descriptor)?;
    let mut records = Vec::with_capacity(rows.len());
    for (pair, descriptor) in pairs.iter().zip(rows) {
        let baseline_score = if cfg.with_baseline {
            Some(baseline_parcorr(&ds, pair.i, pair.j)?)
        } else {
            None
        };
        records.push(TestPairRecord {
            dag_index,
            node_i: ds.column_ids()[pair.i],
            node_j: ds.column_ids()[pair.j],
            label: pair.label,
            descriptor,
            baseline_score,
        });
    }
    Ok(records)
}

/// A scored test pair, ready for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PairScore {
    pub dag_index: usize,
    pub node_i: usize,
    pub node_j: usize,
    pub label: bool,
    pub score: f64,
    pub baseline_score: Option<f64>,
}

pub fn score_records(model: &ForestModel, records: &[TestPairRecord]) -> Result<Vec<PairScore>> {
    records
        .iter()
        .map(|r| {
            Ok(PairScore {
                dag_index: r.dag_index,
                node_i: r.node_i,
                node_j: r.node_j,
                label: r.label,
                score: model.predict_proba(&r.descriptor.features)?,
                baseline_score: r.baseline_score,
            })
        })
        .collect()
}

/// Evaluation summary; `ber` is always recomputable from `confusion`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ber: f64,
    pub auprc: f64,
    pub confusion: Confusion,
    pub n_test_dags: usize,
    pub n_pairs: usize,
    pub baseline_auprc: Option<f64>,
    pub config: ExperimentConfig,
}

pub fn report_from_scores(cfg: &ExperimentConfig, scores: &[PairScore]) -> Result<EvalReport> {
    let labels: Vec<bool> = scores.iter().map(|s| s.label).collect();
    let preds: Vec<bool> = scores.iter().map(|s| s.score > SCORE_THRESHOLD).collect();
    let raw: Vec<f64> = scores.iter().map(|s| s.score).collect();
    let confusion = Confusion::from_predictions(&labels, &preds)?;
    let baseline_auprc = if scores.iter().all(|s| s.baseline_score.is_some()) && !scores.is_empty()
    {
        let b: Vec<f64> = scores.iter().map(|s| s.baseline_score.unwrap()).collect();
        Some(auprc(&b, &labels)?)
    } else {
        None
    };
    Ok(EvalReport {
        ber: confusion.ber(),
        auprc: auprc(&raw, &labels)?,
        confusion,
        n_test_dags: cfg.test_pairs.n_dags,
        n_pairs: scores.len(),
        baseline_auprc,
        config: cfg.clone(),
    })
}

pub struct ExperimentOutcome {
    pub model: ForestModel,
    pub report: EvalReport,
    pub scores: Vec<PairScore>,
}

/// Check that no DAG substream seed is shared between the training and
/// test populations (they are keyed by different purpose tags, so a
/// collision would indicate a derivation bug).
pub fn assert_seed_disjointness(cfg: &ExperimentConfig) -> Result<()> {
    let mut train_seeds: Vec<u64> = Vec::new();
    for d in 0..cfg.train_pairs.n_dags {
        for a in 0..MAX_DAG_ATTEMPTS {
            train_seeds.push(rng::derive(cfg.seed, &[tag::TRAIN_DAG, d as u64, a]));
        }
    }
    train_seeds.sort_unstable();
    for d in 0..cfg.test_pairs.n_dags {
        for a in 0..MAX_DAG_ATTEMPTS {
            let s = rng::derive(cfg.seed, &[tag::TEST_DAG, d as u64, a]);
            if train_seeds.binary_search(&s).is_ok() {
                return Err(Error::Config(
                    "train/test DAG seed collision; derivation scheme broken".to_string(),
                ));
            }
        }
    }
    Ok(())
}

/// Serial end-to-end run: build the training set, train the forest,
/// score fresh test DAGs, and summarize.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    assert_seed_disjointness(cfg)?;
    let ts = build_training_set(cfg)?;
    let model = train_forest(&ts, &cfg.forest, cfg.seed)?;
    let mut records = Vec::with_capacity(cfg.test_pairs.total_pairs());
    for d in 0..cfg.test_pairs.n_dags {
        records.extend(test_records_for_dag(cfg, d)?);
    }
    let scores = score_records(&model, &records)?;
    let report = report_from_scores(cfg, &scores)?;
    Ok(ExperimentOutcome { model, report, scores })
}

/// Direction-blind link baseline: |partial correlation of (i, j)| given
/// the top-3 MI-ranked covariates of column `j` (excluding the pair).
pub fn baseline_parcorr(ds: &Dataset, i: usize, j: usize) -> Result<f64> {
    if i == j || i >= ds.n_cols() || j >= ds.n_cols() {
        return Err(Error::BadIndex("baseline needs two distinct observed columns".to_string()));
    }
    if math::variance(ds.col(i)) <= 1e-12 || math::variance(ds.col(j)) <= 1e-12 {
        return Err(Error::DegenerateInput("constant column in baseline".to_string()));
    }
    let cfg = EstimatorConfig::default();
    let ranked = rank_features(ds, j, 4, MbFilter::Mi, &cfg)?;
    let reduced = mb_minus(&ranked, i);
    let covariates: Vec<&[f64]> =
        reduced.members.iter().take(3).map(|&c| ds.col(c)).collect();
    let ri = linalg::ols_residuals(ds.col(i), &covariates)?;
    let rj = linalg::ols_residuals(ds.col(j), &covariates)?;
    let rho = math::pearson(&ri, &rj);
    if !rho.is_finite() {
        return Err(Error::DegenerateInput("residuals degenerate in baseline".to_string()));
    }
    Ok(math::abs(rho))
}
