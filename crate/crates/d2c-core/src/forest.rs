//! From-scratch random forest for binary descriptor classification.
//!
//! Axis-aligned threshold splits chosen by Gini impurity over a random
//! feature subset per node, each tree fit on a bootstrap resample of the
//! training rows. Trees store leaf positive-class fractions; the forest
//! score is their mean.
//!
//! Determinism: every tree derives its own substream from
//! `hash(seed, tree_index)`, and rows are processed in canonical
//! `row_id` order, so retraining after shuffling the training rows (ids
//! traveling with their rows) rebuilds the identical forest.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::descriptors::DescriptorVector;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{self, tag};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRow {
    /// Stable identity used for canonical ordering and bootstrap keying.
    pub row_id: u64,
    pub features: Vec<f64>,
    pub label: bool,
}

/// Labeled descriptor rows with uniform feature arity and unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    rows: Vec<TrainingRow>,
}

impl TrainingSet {
    pub fn new(rows: Vec<TrainingRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Config("empty training set".to_string()));
        }
        let width = rows[0].features.len();
        if width == 0 {
            return Err(Error::Config("zero-width feature vectors".to_string()));
        }
        for r in &rows {
            if r.features.len() != width {
                return Err(Error::ArityMismatch { expected: width, got: r.features.len() });
            }
            if !math::is_finite_slice(&r.features) {
                return Err(Error::NonFinite(format!("training row {}", r.row_id)));
            }
        }
        let mut ids: Vec<u64> = rows.iter().map(|r| r.row_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("duplicate row ids".to_string()));
        }
        Ok(TrainingSet { rows })
    }

    /// Rows from labeled descriptors, ids assigned in order.
    pub fn from_descriptors(descriptors: Vec<DescriptorVector>) -> Result<Self> {
        let mut rows = Vec::with_capacity(descriptors.len());
        for (idx, d) in descriptors.into_iter().enumerate() {
            let label = d.label.ok_or_else(|| {
                Error::Config(format!("descriptor for pair ({}, {}) is unlabeled", d.i, d.j))
            })?;
            rows.push(TrainingRow { row_id: idx as u64, features: d.features, label });
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[TrainingRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.rows[0].features.len()
    }

    pub fn positive_count(&self) -> usize {
        self.rows.iter().filter(|r| r.label).count()
    }

    pub fn negative_count(&self) -> usize {
        self.len() - self.positive_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Features sampled per node; `None` means floor(sqrt(feature_count)).
    pub mtry: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 500, mtry: None, min_leaf: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split { feature: u32, threshold: f64, left: u32, right: u32 },
    Leaf { pos_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    fn score(&self, x: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { pos_fraction } => return pos_fraction,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if x[feature as usize] <= threshold { left as usize } else { right as usize };
                }
            }
        }
    }
}

/// Trained ensemble mapping feature vectors to a score in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    trees: Vec<Tree>,
    pub n_trees: usize,
    pub mtry: usize,
    pub min_leaf: usize,
    pub feature_count: usize,
    pub train_seed: u64,
}

impl ForestModel {
    /// Mean of per-tree leaf positive fractions; always in [0, 1].
    pub fn predict_proba(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.feature_count {
            return Err(Error::ArityMismatch { expected: self.feature_count, got: features.len() });
        }
        let mut acc = 0.0;
        for t in &self.trees {
            acc += t.score(features);
        }
        Ok(acc / self.trees.len() as f64)
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }
}

/// Free-function form of [`ForestModel::predict_proba`].
pub fn predict_proba(model: &ForestModel, features: &[f64]) -> Result<f64> {
    model.predict_proba(features)
}

pub fn train_forest(ts: &TrainingSet, params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if ts.len() < 2 {
        return Err(Error::Config("need at least 2 training rows".to_string()));
    }
    if ts.positive_count() == 0 || ts.negative_count() == 0 {
        return Err(Error::SingleClass);
    }
    if params.n_trees == 0 {
        return Err(Error::Config("n_trees must be at least 1".to_string()));
    }
    if params.min_leaf == 0 {
        return Err(Error::Config("min_leaf must be at least 1".to_string()));
    }
    let feature_count = ts.feature_count();
    let mtry = params
        .mtry
        .unwrap_or_else(|| (math::sqrt(feature_count as f64) as usize).max(1))
        .clamp(1, feature_count);

    // canonical row order: sorted by row_id, independent of input order
    let mut canonical: Vec<&TrainingRow> = ts.rows().iter().collect();
    canonical.sort_unstable_by_key(|r| r.row_id);

    let trees: Vec<Tree> = (0..params.n_trees)
        .map(|t| grow_tree(&canonical, feature_count, mtry, params.min_leaf, seed, t as u64))
        .collect();

    Ok(ForestModel {
        trees,
        n_trees: params.n_trees,
        mtry,
        min_leaf: params.min_leaf,
        feature_count,
        train_seed: seed,
    })
}

fn grow_tree(
    canonical: &[&TrainingRow],
    feature_count: usize,
    mtry: usize,
    min_leaf: usize,
    seed: u64,
    tree_index: u64,
) -> Tree {
    let mut trng = rng::stream(seed, &[tag::TREE, tree_index]);
    let n = canonical.len();
    let sample: Vec<usize> = (0..n).map(|_| trng.gen_range(0..n)).collect();

    let mut nodes: Vec<TreeNode> = Vec::new();
    // (node slot, row indices) work stack; explicit to keep deep trees off
    // the call stack
    let mut work: Vec<(usize, Vec<usize>)> = Vec::new();
    nodes.push(TreeNode::Leaf { pos_fraction: 0.0 });
    work.push((0, sample));

    while let Some((slot, rows)) = work.pop() {
        let pos = rows.iter().filter(|&&r| canonical[r].label).count();
        let len = rows.len();
        debug_assert!(len > 0, "empty tree node");
        let fraction = pos as f64 / len as f64;
        let splittable = pos != 0 && pos != len && len >= 2 * min_leaf;
        let split = if splittable {
            best_split(canonical, &rows, feature_count, mtry, min_leaf, &mut trng)
        } else {
            None
        };
        match split {
            None => nodes[slot] = TreeNode::Leaf { pos_fraction: fraction },
            Some((feature, threshold)) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .into_iter()
                    .partition(|&r| canonical[r].features[feature] <= threshold);
                let left = nodes.len();
                nodes.push(TreeNode::Leaf { pos_fraction: 0.0 });
                let right = nodes.len();
                nodes.push(TreeNode::Leaf { pos_fraction: 0.0 });
                nodes[slot] = TreeNode::Split {
                    feature: feature as u32,
                    threshold,
                    left: left as u32,
                    right: right as u32,
                };
                // push right first so the left branch is processed next,
                // giving depth-first node numbering
                work.push((right, right_rows));
                work.push((left, left_rows));
            }
        }
    }
    Tree { nodes }
}

/// Greedy Gini split over `mtry` sampled features. Candidate thresholds
/// are midpoints between consecutive distinct sorted values. Ties in
/// gain resolve to the lowest feature index, then the lowest threshold
/// (guaranteed by scanning features and thresholds in ascending order
/// with a strict improvement test).
fn best_split<R: Rng>(
    canonical: &[&TrainingRow],
    rows: &[usize],
    feature_count: usize,
    mtry: usize,
    min_leaf: usize,
    trng: &mut R,
) -> Option<(usize, f64)> {
    let mut features = rng::choose_indices(trng, feature_count, mtry);
    features.sort_unstable();

    let len = rows.len();
    let total_pos = rows.iter().filter(|&&r| canonical[r].label).count();
    let parent_gini = gini(total_pos, len);

    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    let mut vals: Vec<(f64, bool)> = Vec::with_capacity(len);
    for feature in features {
        vals.clear();
        for &r in rows {
            vals.push((canonical[r].features[feature], canonical[r].label));
        }
        vals.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let mut pos_left = 0usize;
        for cut in 1..len {
            if vals[cut - 1].1 {
                pos_left += 1;
            }
            if vals[cut].0 <= vals[cut - 1].0 {
                continue; // not a boundary between distinct values
            }
            let n_left = cut;
            let n_right = len - cut;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let g_left = gini(pos_left, n_left);
            let g_right = gini(total_pos - pos_left, n_right);
            let gain = parent_gini
                - (n_left as f64 / len as f64) * g_left
                - (n_right as f64 / len as f64) * g_right;
            if gain <= 0.0 {
                continue;
            }
            let improves = match best {
                None => true,
                Some((bg, _, _)) => gain > bg,
            };
            if improves {
                // midpoint can round up onto vals[cut] for adjacent
                // floats, which would send every row left; fall back to
                // the left value so `<=` partitions exactly at the cut
                let mut threshold = 0.5 * (vals[cut - 1].0 + vals[cut].0);
                if threshold >= vals[cut].0 {
                    threshold = vals[cut - 1].0;
                }
                best = Some((gain, feature, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

#[inline]
fn gini(pos: usize, n: usize) -> f64 {
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::vec::Vec;

    fn row(id: u64, features: Vec<f64>, label: bool) -> TrainingRow {
        TrainingRow { row_id: id, features, label }
    }

    /// Blob pair along feature `axis` with the given mean gap.
    fn blobs(n: usize, width: usize, axis: usize, gap: f64, seed: u64) -> TrainingSet {
        let mut r = rng::stream(seed, &[0xfe]);
        let mut rows = Vec::with_capacity(n);
        for id in 0..n {
            let label = id % 2 == 0;
            let center = if label { gap / 2.0 } else { -gap / 2.0 };
            let mut f: Vec<f64> = (0..width).map(|_| rng::standard_normal(&mut r)).collect();
            f[axis] += center;
            rows.push(row(id as u64, f, label));
        }
        TrainingSet::new(rows).unwrap()
    }

    #[test]
    fn separable_data_is_memorized() {
        let rows: Vec<TrainingRow> = (0..100)
            .map(|id| {
                let label = id < 50;
                let x = if label { 1.0 + id as f64 * 0.01 } else { -1.0 - id as f64 * 0.01 };
                row(id, vec![x, 0.0, 0.0], label)
            })
            .collect();
        let ts = TrainingSet::new(rows).unwrap();
        let model = train_forest(&ts, &ForestParams { n_trees: 25, mtry: Some(3), min_leaf: 1 }, 7).unwrap();
        for r in ts.rows() {
            let score = model.predict_proba(&r.features).unwrap();
            assert_eq!(score > 0.5, r.label, "row {} scored {score}", r.row_id);
        }
    }

    #[test]
    fn min_leaf_equal_to_set_size_gives_constant_prior() {
        let ts = blobs(100, 5, 0, 4.0, 3);
        let params = ForestParams { n_trees: 1, mtry: None, min_leaf: ts.len() };
        let model = train_forest(&ts, &params, 5).unwrap();
        let a = model.predict_proba(&vec![0.0; 5]).unwrap();
        let b = model.predict_proba(&vec![100.0; 5]).unwrap();
        let c = model.predict_proba(&vec![-3.0; 5]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(a.to_bits(), c.to_bits());
        // the single tree's bootstrap prior is near the 0.5 class prior
        assert!((a - 0.5).abs() < 0.2, "constant score {a}");
    }

    #[test]
    fn wide_gap_blobs_classify_held_out_points() {
        let train = blobs(2000, 43, 7, 4.0, 11);
        let test = blobs(600, 43, 7, 4.0, 12);
        let model =
            train_forest(&train, &ForestParams { n_trees: 100, mtry: None, min_leaf: 1 }, 1).unwrap();
        let correct = test
            .rows()
            .iter()
            .filter(|r| (model.predict_proba(&r.features).unwrap() > 0.5) == r.label)
            .count();
        let acc = correct as f64 / test.len() as f64;
        assert!(acc > 0.95, "held-out accuracy {acc}");
    }

    #[test]
    fn score_is_mean_of_leaf_fractions() {
        let leaf = |f: f64| Tree { nodes: vec![TreeNode::Leaf { pos_fraction: f }] };
        let model = ForestModel {
            trees: vec![leaf(0.2), leaf(0.6)],
            n_trees: 2,
            mtry: 1,
            min_leaf: 1,
            feature_count: 3,
            train_seed: 0,
        };
        let x = [0.0, 0.0, 0.0];
        assert_eq!(model.predict_proba(&x).unwrap(), 0.4);

        let unanimous = ForestModel {
            trees: vec![leaf(1.0), leaf(1.0), leaf(1.0)],
            n_trees: 3,
            mtry: 1,
            min_leaf: 1,
            feature_count: 3,
            train_seed: 0,
        };
        assert_eq!(unanimous.predict_proba(&x).unwrap(), 1.0);
    }

    #[test]
    fn scores_stay_in_unit_interval() {
        let ts = blobs(300, 7, 3, 1.0, 21);
        let model =
            train_forest(&ts, &ForestParams { n_trees: 40, mtry: None, min_leaf: 1 }, 9).unwrap();
        let mut r = rng::stream(5, &[0xaa]);
        for _ in 0..200 {
            let x: Vec<f64> = (0..7).map(|_| 10.0 * rng::standard_normal(&mut r)).collect();
            let s = model.predict_proba(&x).unwrap();
            assert!((0.0..=1.0).contains(&s), "score {s}");
        }
    }

    #[test]
    fn single_class_rejected() {
        let rows: Vec<TrainingRow> = (0..10).map(|id| row(id, vec![id as f64], true)).collect();
        let ts = TrainingSet::new(rows).unwrap();
        assert!(matches!(
            train_forest(&ts, &ForestParams::default(), 0),
            Err(Error::SingleClass)
        ));
    }

    #[test]
    fn prediction_arity_checked() {
        let ts = blobs(40, 4, 0, 3.0, 2);
        let model = train_forest(&ts, &ForestParams { n_trees: 5, mtry: None, min_leaf: 1 }, 2).unwrap();
        assert!(matches!(
            model.predict_proba(&[1.0, 2.0]),
            Err(Error::ArityMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn same_seed_same_model() {
        let ts = blobs(200, 8, 2, 2.0, 9);
        let p = ForestParams { n_trees: 20, mtry: Some(3), min_leaf: 2 };
        let a = train_forest(&ts, &p, 123).unwrap();
        let b = train_forest(&ts, &p, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn row_order_shuffle_rebuilds_identical_forest() {
        let ts = blobs(150, 6, 1, 2.0, 4);
        let mut shuffled_rows = ts.rows().to_vec();
        // deterministic permutation: rotate and interleave
        shuffled_rows.rotate_left(47);
        shuffled_rows.reverse();
        let shuffled = TrainingSet::new(shuffled_rows).unwrap();
        let p = ForestParams { n_trees: 15, mtry: Some(2), min_leaf: 1 };
        let a = train_forest(&ts, &p, 77).unwrap();
        let b = train_forest(&shuffled, &p, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coin_flip_labels_score_near_chance_on_held_out_data() {
        let mut bers = Vec::new();
        for seed in 0..10u64 {
            let mut train = blobs(400, 10, 0, 3.0, 100 + seed);
            let mut r = rng::stream(seed, &[0xc0]);
            for row in train.rows.iter_mut() {
                row.label = r.gen::<bool>();
            }
            // keep both classes present
            if train.positive_count() == 0 || train.negative_count() == 0 {
                continue;
            }
            let test = blobs(500, 10, 0, 3.0, 200 + seed);
            let model =
                train_forest(&train, &ForestParams { n_trees: 60, mtry: None, min_leaf: 1 }, seed)
                    .unwrap();
            let mut fn_count = 0usize;
            let mut fp_count = 0usize;
            let mut pos = 0usize;
            let mut neg = 0usize;
            for row in test.rows() {
                let pred = model.predict_proba(&row.features).unwrap() > 0.5;
                if row.label {
                    pos += 1;
                    if !pred {
                        fn_count += 1;
                    }
                } else {
                    neg += 1;
                    if pred {
                        fp_count += 1;
                    }
                }
            }
            bers.push(0.5 * (fn_count as f64 / pos as f64 + fp_count as f64 / neg as f64));
        }
        let mean = math::mean(&bers);
        assert!((0.45..=0.55).contains(&mean), "mean BER under label noise: {mean}");
    }
}
