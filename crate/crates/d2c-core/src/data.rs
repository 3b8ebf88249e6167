//! Observational datasets simulated from a [`Dag`], plus column hiding
//! and labeled pair sampling.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::dag::Dag;
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{self, tag};

/// N x m observation matrix, column-major, with bookkeeping for which
/// original nodes the columns correspond to and which were hidden.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    column_ids: Vec<usize>,
    hidden_ids: Vec<usize>,
    n_rows: usize,
}

impl Dataset {
    pub fn from_parts(
        columns: Vec<Vec<f64>>,
        column_ids: Vec<usize>,
        hidden_ids: Vec<usize>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Config("dataset needs at least one column".to_string()));
        }
        if columns.len() != column_ids.len() {
            return Err(Error::Config("one id per column required".to_string()));
        }
        let n_rows = columns[0].len();
        if n_rows == 0 {
            return Err(Error::Config("dataset needs at least one row".to_string()));
        }
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::Config("ragged columns".to_string()));
        }
        if columns.iter().any(|c| !math::is_finite_slice(c)) {
            return Err(Error::NonFinite("dataset construction".to_string()));
        }
        for id in &column_ids {
            if hidden_ids.contains(id) {
                return Err(Error::Config("column id also marked hidden".to_string()));
            }
        }
        Ok(Dataset { columns, column_ids, hidden_ids, n_rows })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn col(&self, pos: usize) -> &[f64] {
        &self.columns[pos]
    }

    /// Original node indices of the retained columns, in column order.
    pub fn column_ids(&self) -> &[usize] {
        &self.column_ids
    }

    pub fn hidden_ids(&self) -> &[usize] {
        &self.hidden_ids
    }

    /// Column position of an original node index, if observed.
    pub fn position_of(&self, node: usize) -> Option<usize> {
        self.column_ids.iter().position(|&id| id == node)
    }
}

/// Center a column and scale it to unit variance; constant columns
/// (possible only in degenerate cases like N = 1) are just centered.
fn standardize(col: &mut [f64]) {
    let m = math::mean(col);
    for v in col.iter_mut() {
        *v -= m;
    }
    let sd = math::sqrt(math::variance(col));
    if sd > 1e-12 {
        for v in col.iter_mut() {
            *v /= sd;
        }
    }
}

const SIMULATE_RETRIES: u64 = 4;

/// Simulate `n_samples` observations: nodes are generated in topological
/// order as the sum of edge functions of their (already standardized)
/// parents plus Gaussian noise, and each column is standardized before
/// children consume it. Standardization keeps the quadratic family from
/// blowing up; a draw that still goes non-finite is resampled a bounded
/// number of times before erroring.
pub fn simulate(dag: &Dag, n_samples: usize, seed: u64) -> Result<Dataset> {
    if n_samples == 0 {
        return Err(Error::Config("need at least one sample".to_string()));
    }
    let order = dag.topological_order()?;
    let n = dag.node_count();

    'attempt: for attempt in 0..SIMULATE_RETRIES {
        let mut rng = rng::stream(seed, &[tag::SIMULATE, attempt]);
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); n];
        for &v in &order {
            let sigma = dag.noise_sigma()[v];
            let mut col: Vec<f64> =
                (0..n_samples).map(|_| sigma * rng::standard_normal(&mut rng)).collect();
            for e in dag.edges().iter().filter(|e| e.child == v) {
                let parent = &cols[e.parent];
                for (r, value) in col.iter_mut().enumerate() {
                    *value += e.func.eval(parent[r]);
                }
            }
            if !math::is_finite_slice(&col) {
                continue 'attempt;
            }
            standardize(&mut col);
            cols[v] = col;
        }
        let ids = (0..n).collect();
        return Dataset::from_parts(cols, ids, Vec::new());
    }
    Err(Error::NonFinite(format!(
        "simulation of {n} nodes still non-finite after {SIMULATE_RETRIES} attempts"
    )))
}

/// Remove `floor(fraction * n_cols)` columns uniformly at random,
/// never touching `protected` (original node indices).
pub fn hide_variables(
    ds: &Dataset,
    fraction: f64,
    protected: &[usize],
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Config(format!("hide fraction {fraction} not in [0, 1)")));
    }
    for p in protected {
        if ds.position_of(*p).is_none() {
            return Err(Error::BadIndex(format!("protected node {p} is not an observed column")));
        }
    }
    let n = ds.n_cols();
    let remove = math::floor(fraction * n as f64) as usize;
    if remove == 0 {
        return Ok(ds.clone());
    }
    let candidates: Vec<usize> = (0..n)
        .filter(|&pos| !protected.contains(&ds.column_ids()[pos]))
        .collect();
    if remove > candidates.len() {
        return Err(Error::CannotHide(format!(
            "fraction {fraction} removes {remove} columns but only {} are unprotected",
            candidates.len()
        )));
    }
    if n - remove < 2 {
        return Err(Error::CannotHide(format!(
            "cannot hide all columns: removing {remove} of {n} leaves fewer than 2"
        )));
    }
    let mut rng = rng::stream(seed, &[tag::HIDE]);
    let mut drop_pos: Vec<usize> = rng::choose_indices(&mut rng, candidates.len(), remove)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    drop_pos.sort_unstable();

    let mut columns = Vec::with_capacity(n - remove);
    let mut column_ids = Vec::with_capacity(n - remove);
    let mut hidden_ids = ds.hidden_ids().to_vec();
    for pos in 0..n {
        if drop_pos.binary_search(&pos).is_ok() {
            hidden_ids.push(ds.column_ids()[pos]);
        } else {
            columns.push(ds.col(pos).to_vec());
            column_ids.push(ds.column_ids()[pos]);
        }
    }
    hidden_ids.sort_unstable();
    Dataset::from_parts(columns, column_ids, hidden_ids)
}

/// Ordered candidate pair over dataset column positions; `label` is true
/// iff the column-`i` node is a direct cause of the column-`j` node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledPair {
    pub i: usize,
    pub j: usize,
    pub label: bool,
}

/// Sample `n_pos` true-edge pairs and `n_neg` negatives from the observed
/// columns. Negatives are half reversed true edges and half uniformly
/// random non-adjacent ordered pairs, so both direction errors and
/// link-existence errors appear in the label distribution.
pub fn sample_pairs(
    dag: &Dag,
    ds: &Dataset,
    n_pos: usize,
    n_neg: usize,
    seed: u64,
) -> Result<Vec<LabeledPair>> {
    let mut rng = rng::stream(seed, &[tag::PAIRS]);

    // true edges with both endpoints observed, as column positions
    let mut edge_pairs: Vec<(usize, usize)> = Vec::new();
    for e in dag.edges() {
        if let (Some(pi), Some(pj)) = (ds.position_of(e.parent), ds.position_of(e.child)) {
            edge_pairs.push((pi, pj));
        }
    }
    if edge_pairs.len() < n_pos {
        return Err(Error::InsufficientPairs {
            requested: n_pos,
            available: edge_pairs.len(),
            kind: "positive",
        });
    }

    let picked = rng::choose_indices(&mut rng, edge_pairs.len(), n_pos);
    let mut pairs: Vec<LabeledPair> =
        picked.iter().map(|&k| LabeledPair { i: edge_pairs[k].0, j: edge_pairs[k].1, label: true }).collect();

    // non-adjacency is checked on original node indices
    let adjacent = |pi: usize, pj: usize| {
        dag.is_adjacent(ds.column_ids()[pi], ds.column_ids()[pj])
    };

    let n_reversed = n_neg / 2;
    let mut negatives: Vec<(usize, usize)> = Vec::with_capacity(n_neg);

    let reversed_pool: Vec<(usize, usize)> = edge_pairs.iter().map(|&(a, b)| (b, a)).collect();
    let rev_picked = rng::choose_indices(&mut rng, reversed_pool.len(), n_reversed);
    for k in rev_picked {
        negatives.push(reversed_pool[k]);
    }

    // fill the rest with random non-adjacent ordered pairs
    let m = ds.n_cols();
    let mut attempts = 0usize;
    let max_attempts = 200 * (n_neg + 1) + 10_000;
    while negatives.len() < n_neg && attempts < max_attempts {
        attempts += 1;
        let a = rng.gen_range(0..m);
        let b = rng.gen_range(0..m);
        if a == b || adjacent(a, b) || negatives.contains(&(a, b)) {
            continue;
        }
        negatives.push((a, b));
    }
    if negatives.len() < n_neg {
        // dense or tiny graphs: enumerate what is left
        let mut pool: Vec<(usize, usize)> = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a != b && !adjacent(a, b) && !negatives.contains(&(a, b)) {
                    pool.push((a, b));
                }
            }
        }
        // reversed edges not already used are valid negatives too
        for &(a, b) in &reversed_pool {
            if !negatives.contains(&(a, b)) {
                pool.push((a, b));
            }
        }
        let need = n_neg - negatives.len();
        if pool.len() < need {
            return Err(Error::InsufficientPairs {
                requested: n_neg,
                available: negatives.len() + pool.len(),
                kind: "negative",
            });
        }
        for k in rng::choose_indices(&mut rng, pool.len(), need) {
            negatives.push(pool[k]);
        }
    }

    pairs.extend(negatives.into_iter().map(|(i, j)| LabeledPair { i, j, label: false }));
    Ok(pairs)
}
