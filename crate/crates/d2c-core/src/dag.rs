//! Random causal DAGs with structural-equation parameterizations.
//!
//! A [`Dag`] holds the ground-truth graph together with the per-edge
//! functional forms and coefficients and per-node noise scales that drive
//! simulation. Nodes are indexed `0..node_count`; generated graphs have
//! parents preceding children, but manually built graphs may use any
//! acyclic edge set.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;
use crate::rng::{self, tag};

/// Edge function family; variants carry their own coefficients so an
/// edge can never have the wrong coefficient count for its form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum EdgeFunc {
    Linear { a0: f64, a1: f64 },
    Quadratic { a0: f64, a1: f64, a2: f64 },
    Sigmoid { a0: f64, a1: f64 },
}

impl EdgeFunc {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            EdgeFunc::Linear { a0, a1 } => a0 + a1 * x,
            EdgeFunc::Quadratic { a0, a1, a2 } => a0 + a1 * x + a2 * x * x,
            // logistic form; saturates in (0, 1)
            EdgeFunc::Sigmoid { a0, a1 } => 1.0 / (1.0 + math::exp(-(a0 + a1 * x))),
        }
    }

    pub fn form_name(&self) -> &'static str {
        match self {
            EdgeFunc::Linear { .. } => "linear",
            EdgeFunc::Quadratic { .. } => "quadratic",
            EdgeFunc::Sigmoid { .. } => "sigmoid",
        }
    }
}

/// Dependency family used when sampling a DAG: every edge receives this
/// form with freshly drawn coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepType {
    Linear,
    Quadratic,
    Sigmoid,
}

/// Node-count specification for DAG sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeCount {
    /// 20..=30 nodes.
    Small,
    /// 100..=200 nodes.
    Medium,
    /// 500..=1000 nodes.
    Large,
    /// Exactly this many nodes.
    Exact(usize),
    /// Uniform on `lo..=hi`.
    Range { lo: usize, hi: usize },
}

impl NodeCount {
    fn interval(self) -> Result<(usize, usize)> {
        let (lo, hi) = match self {
            NodeCount::Small => (20, 30),
            NodeCount::Medium => (100, 200),
            NodeCount::Large => (500, 1000),
            NodeCount::Exact(n) => (n, n),
            NodeCount::Range { lo, hi } => (lo, hi),
        };
        if lo > hi {
            return Err(Error::InvalidSizeInterval { lo, hi });
        }
        if lo == 0 {
            return Err(Error::Config("node count must be at least 1".to_string()));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub parent: usize,
    pub child: usize,
    pub func: EdgeFunc,
}

/// Ground-truth causal graph plus structural-equation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dag {
    node_count: usize,
    edges: Vec<Edge>,
    noise_sigma: Vec<f64>,
    seed: u64,
}

impl Dag {
    /// Validates acyclicity, self-loops, duplicate edges, and noise scales.
    pub fn new(node_count: usize, edges: Vec<Edge>, noise_sigma: Vec<f64>, seed: u64) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Config("node count must be at least 1".to_string()));
        }
        if noise_sigma.len() != node_count {
            return Err(Error::Config("one noise sigma per node required".to_string()));
        }
        if noise_sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::Config("noise sigmas must be positive and finite".to_string()));
        }
        for e in &edges {
            if e.parent == e.child {
                return Err(Error::Config("self-loop edge".to_string()));
            }
            if e.parent >= node_count || e.child >= node_count {
                return Err(Error::Config("edge endpoint out of range".to_string()));
            }
        }
        for (k, e) in edges.iter().enumerate() {
            for e2 in &edges[k + 1..] {
                if e.parent == e2.parent && e.child == e2.child {
                    return Err(Error::Config("duplicate edge".to_string()));
                }
            }
        }
        let dag = Dag { node_count, edges, noise_sigma, seed };
        dag.topological_order()?; // rejects cycles
        Ok(dag)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn noise_sigma(&self) -> &[f64] {
        &self.noise_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_edge(&self, parent: usize, child: usize) -> bool {
        self.edges.iter().any(|e| e.parent == parent && e.child == child)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.is_edge(a, b) || self.is_edge(b, a)
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> =
            self.edges.iter().filter(|e| e.child == v).map(|e| e.parent).collect();
        p.sort_unstable();
        p
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        let mut c: Vec<usize> =
            self.edges.iter().filter(|e| e.parent == v).map(|e| e.child).collect();
        c.sort_unstable();
        c
    }

    /// Co-parents: other direct causes of `v`'s children.
    pub fn spouses(&self, v: usize) -> Vec<usize> {
        let mut s = Vec::new();
        for c in self.children(v) {
            for p in self.parents(c) {
                if p != v && !s.contains(&p) {
                    s.push(p);
                }
            }
        }
        s.sort_unstable();
        s
    }

    /// Parents, children, and spouses of `v`, sorted and deduplicated.
    pub fn markov_blanket(&self, v: usize) -> Vec<usize> {
        let mut mb = self.parents(v);
        for c in self.children(v) {
            if !mb.contains(&c) {
                mb.push(c);
            }
        }
        for s in self.spouses(v) {
            if !mb.contains(&s) {
                mb.push(s);
            }
        }
        mb.sort_unstable();
        mb
    }

    /// Kahn's algorithm; errors if the edge set contains a cycle.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.node_count;
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.child] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        // pop smallest index first so the order is canonical
        queue.sort_unstable_by(|a, b| b.cmp(a));
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for e in self.edges.iter().filter(|e| e.parent == v) {
                indeg[e.child] -= 1;
                if indeg[e.child] == 0 {
                    let pos = queue.binary_search_by(|q| e.child.cmp(q)).unwrap_or_else(|p| p);
                    queue.insert(pos, e.child);
                }
            }
        }
        if order.len() != n {
            return Err(Error::Config("edge set contains a cycle".to_string()));
        }
        Ok(order)
    }
}

/// Parameters for random DAG sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DagGenConfig {
    pub nodes: NodeCount,
    pub max_parents: usize,
    pub dep: DepType,
}

impl Default for DagGenConfig {
    fn default() -> Self {
        DagGenConfig { nodes: NodeCount::Small, max_parents: 3, dep: DepType::Linear }
    }
}

/// Coefficient magnitudes stay in [0.3, 1] so edges carry a learnable effect.
fn draw_coeff<R: Rng>(rng: &mut R) -> f64 {
    let mag = rng.gen_range(0.3..1.0);
    if rng.gen_range(0..2) == 0 {
        mag
    } else {
        -mag
    }
}

fn draw_func<R: Rng>(rng: &mut R, dep: DepType) -> EdgeFunc {
    match dep {
        DepType::Linear => EdgeFunc::Linear { a0: draw_coeff(rng), a1: draw_coeff(rng) },
        DepType::Quadratic => EdgeFunc::Quadratic {
            a0: draw_coeff(rng),
            a1: draw_coeff(rng),
            a2: draw_coeff(rng),
        },
        DepType::Sigmoid => EdgeFunc::Sigmoid { a0: draw_coeff(rng), a1: draw_coeff(rng) },
    }
}

/// Sample a random DAG. Node `i` draws its parent count uniformly on
/// `0..=min(max_parents, i)` and its parents uniformly among earlier
/// nodes, so the result is acyclic by construction.
pub fn sample_dag(cfg: &DagGenConfig, seed: u64) -> Result<Dag> {
    if cfg.max_parents < 1 {
        return Err(Error::Config("max_parents must be at least 1".to_string()));
    }
    let (lo, hi) = cfg.nodes.interval()?;
    let mut rng = rng::stream(seed, &[tag::DAG_STRUCT]);
    let n = rng.gen_range(lo..=hi);

    let mut edges = Vec::new();
    for child in 0..n {
        let avail = child;
        let count = rng.gen_range(0..=cfg.max_parents.min(avail));
        let mut parents = rng::choose_indices(&mut rng, avail, count);
        parents.sort_unstable();
        for parent in parents {
            edges.push(Edge { parent, child, func: draw_func(&mut rng, cfg.dep) });
        }
    }
    let noise_sigma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    Dag::new(n, edges, noise_sigma, seed)
}
