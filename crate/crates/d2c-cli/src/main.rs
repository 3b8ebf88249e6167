//! `d2c`: causal-link prediction pipeline over synthetic DAG benchmarks.
//!
//! Subcommands: `gen` (simulate a dataset + ground-truth sidecar),
//! `train` (build a descriptor training set and fit the forest),
//! `predict` (score one ordered pair with a saved model), and `eval`
//! (the full train/test protocol with BER/AUPRC reports).
//!
//! All randomness flows from config seeds; logs go to stderr, data to
//! files or stdout. Reruns with the same config are byte-identical.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};

use d2c_core::dag::DagGenConfig;
use d2c_core::data::{hide_variables, simulate};
use d2c_core::descriptors::compute_descriptor;
use d2c_core::experiment::{report_from_scores, sample_count_for, score_records};
use d2c_core::forest::train_forest;
use d2c_core::mb::default_blanket_size;

use d2c_cli::config::{self, EvalConfig, GenConfig, TrainConfig};
use d2c_cli::{io, parallel};

#[derive(Parser)]
#[command(name = "d2c", version, about = "Predict directed causal links from observational data")]
struct Cli {
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap rayon worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset from a random DAG; write CSV + JSON sidecar.
    Gen {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build a training set, train the forest, persist the model.
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Score one ordered pair (i, j) with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// 1-based node id of the candidate cause (as in the CSV header).
        #[arg(short = 'i', long)]
        i: usize,
        /// 1-based node id of the candidate effect.
        #[arg(short = 'j', long)]
        j: usize,
        /// Also print the full descriptor vector.
        #[arg(long)]
        emit_descriptor: bool,
    },
    /// Run the train/test protocol; write report JSON + score CSVs.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Also score test pairs with the partial-correlation baseline.
        #[arg(long)]
        baseline: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: setting thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Gen { config } => cmd_gen(&config, cli.seed),
        Command::Train { config } => cmd_train(&config, cli.seed),
        Command::Predict { model, data, i, j, emit_descriptor } => {
            cmd_predict(&model, &data, i, j, emit_descriptor)
        }
        Command::Eval { config, baseline } => cmd_eval(&config, cli.seed, baseline),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_gen(config_path: &PathBuf, seed_override: Option<u64>) -> Result<()> {
    let mut cfg: GenConfig = config::load(config_path)?;
    if let Some(s) = seed_override {
        cfg.seed = s;
    }
    let gen_cfg = DagGenConfig {
        nodes: cfg.data.nodes,
        max_parents: cfg.data.max_parents,
        dep: cfg.data.dep,
    };
    let dag = d2c_core::dag::sample_dag(&gen_cfg, cfg.seed).map_err(|e| anyhow!("{e}"))?;
    let n = cfg.n_samples.unwrap_or_else(|| sample_count_for(&cfg.data, cfg.seed));
    let full = simulate(&dag, n, cfg.seed).map_err(|e| anyhow!("{e}"))?;
    let protected: Vec<usize> = cfg
        .protected
        .iter()
        .map(|&id| id.checked_sub(1).ok_or_else(|| anyhow!("protected id 0 is not 1-based")))
        .collect::<Result<_>>()?;
    let ds = hide_variables(&full, cfg.data.hide_fraction, &protected, cfg.seed)
        .map_err(|e| anyhow!("{e}"))?;

    io::create_parent_dirs(&cfg.out_csv)?;
    io::create_parent_dirs(&cfg.out_meta)?;
    io::write_dataset_csv(&cfg.out_csv, &ds)?;
    let meta = io::DatasetMeta::new(&dag, &ds, n, cfg.seed);
    io::write_meta(&cfg.out_meta, &meta)?;

    // validate: the written pair must parse back to the same dataset
    let back_meta = io::read_meta(&cfg.out_meta)?;
    let back = io::read_dataset_csv(&cfg.out_csv, back_meta.hidden_ids_internal()?)?;
    if back != ds || back_meta.dag != dag {
        bail!("round-trip mismatch after writing {}", cfg.out_csv.display());
    }
    eprintln!(
        "gen: {} rows x {} columns ({} hidden) -> {}",
        ds.n_rows(),
        ds.n_cols(),
        ds.hidden_ids().len(),
        cfg.out_csv.display()
    );
    Ok(())
}

fn cmd_train(config_path: &PathBuf, seed_override: Option<u64>) -> Result<()> {
    let mut cfg: TrainConfig = config::load(config_path)?;
    if let Some(s) = seed_override {
        cfg.seed = s;
    }
    let experiment = cfg.as_experiment();
    let ts = parallel::build_training_set(&experiment)?;
    eprintln!(
        "training set: {} pairs ({}/{})",
        ts.len(),
        ts.positive_count(),
        ts.negative_count()
    );
    let model = train_forest(&ts, &cfg.forest, cfg.seed).map_err(|e| anyhow!("{e}"))?;
    io::create_parent_dirs(&cfg.model_out)?;
    io::write_model(&cfg.model_out, &model, &cfg.descriptor)?;
    eprintln!(
        "model: {} trees on {} features -> {}",
        model.n_trees,
        model.feature_count,
        cfg.model_out.display()
    );
    if let Some(out) = &cfg.descriptors_out {
        io::create_parent_dirs(out)?;
        let rows: Vec<_> = ts
            .rows()
            .iter()
            .map(|r| d2c_core::descriptors::DescriptorVector {
                i: 0,
                j: 0,
                features: r.features.clone(),
                label: Some(r.label),
            })
            .collect();
        io::write_descriptor_csv(out, &rows, |i, j| (i, j))?;
        eprintln!("descriptors: {} rows -> {}", rows.len(), out.display());
    }
    Ok(())
}

fn cmd_predict(
    model_path: &PathBuf,
    data_path: &PathBuf,
    i: usize,
    j: usize,
    emit_descriptor: bool,
) -> Result<()> {
    let envelope = io::read_model(model_path)?;
    let ds = io::read_dataset_csv(data_path, Vec::new())?;
    let pos = |id: usize| -> Result<usize> {
        let node = id.checked_sub(1).ok_or_else(|| anyhow!("node ids are 1-based, got 0"))?;
        ds.position_of(node)
            .ok_or_else(|| anyhow!("node {id} is not an observed column of {}", data_path.display()))
    };
    let pi = pos(i)?;
    let pj = pos(j)?;
    let settings = envelope.descriptor;
    let k = settings.k.unwrap_or_else(|| default_blanket_size(ds.n_cols()));
    let descriptor = compute_descriptor(&ds, pi, pj, k, settings.filter, &settings.estimator)
        .map_err(|e| anyhow!("{e}"))?;
    let score = envelope.model.predict_proba(&descriptor.features).map_err(|e| anyhow!("{e}"))?;
    println!("{score}");
    if emit_descriptor {
        let fields: Vec<String> = descriptor.features.iter().map(|v| format!("{v}")).collect();
        println!("{}", fields.join(","));
    }
    Ok(())
}

fn cmd_eval(config_path: &PathBuf, seed_override: Option<u64>, baseline: bool) -> Result<()> {
    let mut cfg: EvalConfig = config::load(config_path)?;
    if let Some(s) = seed_override {
        cfg.experiment.seed = s;
    }
    if baseline {
        cfg.experiment.with_baseline = true;
    }
    let exp = cfg.experiment.clone();
    if cfg.training_sizes.is_some() && cfg.ber_curve_out.is_none() {
        bail!("training_sizes given but ber_curve_out missing");
    }

    // test records are shared by every training size
    let records = parallel::test_records(&exp)?;

    let ts = parallel::build_training_set(&exp)?;
    eprintln!(
        "training set: {} pairs ({}/{})",
        ts.len(),
        ts.positive_count(),
        ts.negative_count()
    );
    let model = train_forest(&ts, &exp.forest, exp.seed).map_err(|e| anyhow!("{e}"))?;
    let scores = score_records(&model, &records).map_err(|e| anyhow!("{e}"))?;
    let report = report_from_scores(&exp, &scores).map_err(|e| anyhow!("{e}"))?;

    io::create_parent_dirs(&cfg.report_out)?;
    io::create_parent_dirs(&cfg.scores_out)?;
    io::write_report_json(&cfg.report_out, &report)?;
    io::write_scores_csv(&cfg.scores_out, &scores)?;
    eprintln!(
        "eval: BER {:.4} AUPRC {:.4}{} over {} pairs from {} test DAGs",
        report.ber,
        report.auprc,
        report
            .baseline_auprc
            .map(|b| format!(" (baseline AUPRC {b:.4})"))
            .unwrap_or_default(),
        report.n_pairs,
        report.n_test_dags
    );

    if let Some(curve_out) = &cfg.ber_curve_out {
        let configured = exp.train_pairs.total_pairs();
        let sizes = cfg.training_sizes.clone().unwrap_or_else(|| vec![configured]);
        let ppd = exp.train_pairs.pairs_per_dag();
        let mut rows = Vec::with_capacity(sizes.len());
        for size in sizes {
            if size == 0 {
                bail!("training size 0 in training_sizes");
            }
            let (ber_s, auprc_s, actual) = if size == configured {
                (report.ber, report.auprc, ts.len())
            } else {
                let mut exp_s = exp.clone();
                exp_s.train_pairs.n_dags = size.div_ceil(ppd);
                let ts_s = parallel::build_training_set(&exp_s)?;
                let model_s =
                    train_forest(&ts_s, &exp_s.forest, exp_s.seed).map_err(|e| anyhow!("{e}"))?;
                let scores_s = score_records(&model_s, &records).map_err(|e| anyhow!("{e}"))?;
                let report_s = report_from_scores(&exp_s, &scores_s).map_err(|e| anyhow!("{e}"))?;
                (report_s.ber, report_s.auprc, ts_s.len())
            };
            eprintln!("curve: {actual} pairs -> BER {ber_s:.4} AUPRC {auprc_s:.4}");
            rows.push((actual, ber_s, auprc_s));
        }
        io::create_parent_dirs(curve_out)?;
        io::write_ber_curve_csv(curve_out, &rows)?;
    }
    Ok(())
}
