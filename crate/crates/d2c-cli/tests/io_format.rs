//! File-format round trips and config validation.

use d2c_cli::{config, io};
use d2c_core::dag::{sample_dag, DagGenConfig, DepType, NodeCount};
use d2c_core::data::{hide_variables, simulate};
use d2c_core::experiment::DescriptorSettings;
use d2c_core::forest::{train_forest, ForestParams, TrainingRow, TrainingSet};

#[test]
fn dataset_csv_and_sidecar_round_trip_bit_exactly() {
    let gen_cfg = DagGenConfig { nodes: NodeCount::Small, max_parents: 3, dep: DepType::Quadratic };
    let dag = sample_dag(&gen_cfg, 7).unwrap();
    let full = simulate(&dag, 150, 7).unwrap();
    let ds = hide_variables(&full, 0.05, &[], 7).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ds.csv");
    let meta_path = dir.path().join("ds.meta.json");
    io::write_dataset_csv(&csv, &ds).unwrap();
    io::write_meta(&meta_path, &io::DatasetMeta::new(&dag, &ds, 150, 7)).unwrap();

    let meta = io::read_meta(&meta_path).unwrap();
    assert_eq!(meta.dag, dag);
    let back = io::read_dataset_csv(&csv, meta.hidden_ids_internal().unwrap()).unwrap();
    assert_eq!(back, ds);
}

fn toy_training_set() -> TrainingSet {
    let rows = (0..20)
        .map(|id| TrainingRow {
            row_id: id,
            features: vec![id as f64, -(id as f64) * 0.5, (id % 3) as f64],
            label: id % 2 == 0,
        })
        .collect();
    TrainingSet::new(rows).unwrap()
}

#[test]
fn model_file_round_trips_and_checks_version() {
    let ts = toy_training_set();
    let model =
        train_forest(&ts, &ForestParams { n_trees: 7, mtry: Some(2), min_leaf: 1 }, 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    io::write_model(&path, &model, &DescriptorSettings::default()).unwrap();
    let envelope = io::read_model(&path).unwrap();
    assert_eq!(envelope.model, model);
    assert_eq!(envelope.version, io::MODEL_VERSION);

    // tampered version is rejected
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replace("\"version\":1", "\"version\":99")).unwrap();
    let err = io::read_model(&path).unwrap_err().to_string();
    assert!(err.contains("version"), "unexpected error: {err}");

    // garbage is rejected with the format name in the message
    std::fs::write(&path, b"{ not json").unwrap();
    let err = io::read_model(&path).unwrap_err().to_string();
    assert!(err.contains("d2c-forest"), "unexpected error: {err}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    std::fs::write(
        &path,
        r#"{ "seed": 1, "out_csv": "a.csv", "out_meta": "a.json", "typo_key": 3 }"#,
    )
    .unwrap();
    let err = config::load::<config::GenConfig>(&path).unwrap_err();
    assert!(format!("{err:#}").contains("typo_key"), "{err:#}");

    std::fs::write(
        &path,
        r#"{ "seed": 1, "out_csv": "a.csv", "out_meta": "a.json",
             "data": { "nodes": "small", "surprise": 1 } }"#,
    )
    .unwrap();
    let err = config::load::<config::GenConfig>(&path).unwrap_err();
    assert!(format!("{err:#}").contains("surprise"), "{err:#}");
}

#[test]
fn train_config_arithmetic_reaches_paper_scale() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.json");
    std::fs::write(
        &path,
        r#"{ "seed": 1,
             "train_pairs": { "n_dags": 750, "pos_per_dag": 4, "neg_per_dag": 4 },
             "model_out": "m.json" }"#,
    )
    .unwrap();
    let cfg: config::TrainConfig = config::load(&path).unwrap();
    assert_eq!(cfg.as_experiment().train_pairs.total_pairs(), 6000);
}

#[test]
fn descriptor_csv_has_versioned_header_and_full_arity() {
    let names = io::descriptor_feature_names();
    assert_eq!(names.len(), d2c_core::descriptors::DESCRIPTOR_LEN);
    assert_eq!(names[0], "I0");
    assert_eq!(names[3], "Pi_q10");
    assert_eq!(names[42], "D3rev_q90");
}
