//! Generalization-gap and determinism checks for the end-to-end
//! experiment driver (reduced DAG counts; the full-scale protocol runs
//! in the acceptance suite).

use d2c_core::dag::NodeCount;
use d2c_core::experiment::{
    build_training_set, run_experiment, DataProtocol, ExperimentConfig, PairProtocol,
    SCORE_THRESHOLD,
};
use d2c_core::forest::{train_forest, ForestParams};
use d2c_core::metrics::ber;

fn small_cfg(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        train_data: DataProtocol { nodes: NodeCount::Exact(15), ..Default::default() },
        train_pairs: PairProtocol { n_dags: 20, pos_per_dag: 2, neg_per_dag: 2 },
        test_data: DataProtocol { nodes: NodeCount::Exact(15), ..Default::default() },
        test_pairs: PairProtocol { n_dags: 10, pos_per_dag: 2, neg_per_dag: 3 },
        forest: ForestParams { n_trees: 500, mtry: None, min_leaf: 1 },
        seed,
        ..Default::default()
    }
}

#[test]
fn memorizing_forest_scores_training_pairs_better_than_fresh_dags() {
    let mut train_bers = Vec::new();
    let mut heldout_bers = Vec::new();
    for seed in 0..10u64 {
        let cfg = small_cfg(100 + seed);
        let ts = build_training_set(&cfg).unwrap();
        let model = train_forest(&ts, &cfg.forest, cfg.seed).unwrap();

        let labels: Vec<bool> = ts.rows().iter().map(|r| r.label).collect();
        let preds: Vec<bool> = ts
            .rows()
            .iter()
            .map(|r| model.predict_proba(&r.features).unwrap() > SCORE_THRESHOLD)
            .collect();
        train_bers.push(ber(&labels, &preds).unwrap());

        let out = run_experiment(&cfg).unwrap();
        heldout_bers.push(out.report.ber);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let train_mean = mean(&train_bers);
    let heldout_mean = mean(&heldout_bers);
    assert!(
        train_mean < heldout_mean,
        "training-pair BER {train_mean:.3} should be below held-out BER {heldout_mean:.3}"
    );
    // a min_leaf=1 forest essentially memorizes its training pairs
    assert!(train_mean < 0.1, "memorization BER unexpectedly high: {train_mean:.3}");
}

#[test]
fn rerun_with_same_config_is_identical() {
    let cfg = small_cfg(77);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.scores, b.scores);
    assert_eq!(a.model, b.model);
}
