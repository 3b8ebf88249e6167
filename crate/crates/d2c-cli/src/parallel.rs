//! Rayon drivers over the per-DAG pure functions. Work is keyed by DAG
//! index and collected in index order, so these produce output
//! bit-identical to the serial reference drivers regardless of thread
//! count.

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use d2c_core::experiment::{
    assemble_training_set, assert_seed_disjointness, report_from_scores, score_records,
    test_records_for_dag, training_rows_for_dag, ExperimentConfig, ExperimentOutcome,
    TestPairRecord,
};
use d2c_core::forest::{train_forest, TrainingSet};

pub fn build_training_set(cfg: &ExperimentConfig) -> Result<TrainingSet> {
    let per_dag = (0..cfg.train_pairs.n_dags)
        .into_par_iter()
        .map(|d| training_rows_for_dag(cfg, d))
        .collect::<d2c_core::Result<Vec<_>>>()
        .map_err(|e| anyhow!("{e}"))?;
    assemble_training_set(cfg, per_dag).map_err(|e| anyhow!("{e}"))
}

pub fn test_records(cfg: &ExperimentConfig) -> Result<Vec<TestPairRecord>> {
    let per_dag = (0..cfg.test_pairs.n_dags)
        .into_par_iter()
        .map(|d| test_records_for_dag(cfg, d))
        .collect::<d2c_core::Result<Vec<_>>>()
        .map_err(|e| anyhow!("{e}"))?;
    Ok(per_dag.into_iter().flatten().collect())
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    assert_seed_disjointness(cfg).map_err(|e| anyhow!("{e}"))?;
    let ts = build_training_set(cfg)?;
    let model = train_forest(&ts, &cfg.forest, cfg.seed).map_err(|e| anyhow!("{e}"))?;
    let records = test_records(cfg)?;
    let scores = score_records(&model, &records).map_err(|e| anyhow!("{e}"))?;
    let report = report_from_scores(cfg, &scores).map_err(|e| anyhow!("{e}"))?;
    Ok(ExperimentOutcome { model, report, scores })
}
