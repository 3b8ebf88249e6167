//! Descriptor vectors for ordered variable pairs.
//!
//! For a candidate pair (i, j) the descriptor concatenates three
//! (conditional) MI terms with five-quantile summaries of eight
//! populations derived from the two ranked blankets: the cross-ranking
//! position populations and the forward/reverse D1, D2, D3 populations.
//! The construction is antisymmetric by blocks: computing the pair in
//! the opposite order permutes whole blocks of the vector and nothing
//! else (see [`swap_orientation`]).
//!
//! [`oracle_descriptors`] computes the four cause/effect-aware
//! descriptors in both orientations from ground-truth graph structure;
//! it exists to validate the asymmetry predictions in tests and is never
//! part of the learning pipeline.

use alloc::format;
use alloc::vec::Vec;

use crate::dag::Dag;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimator::{cond_mi, mi, EstimatorConfig};
use crate::mb::{mb_minus, rank_features, MarkovBlanketRanking, MbFilter};
use crate::rng::{self, tag};

/// 3 MI terms + 8 populations x 5 quantiles.
pub const DESCRIPTOR_LEN: usize = 43;

/// Quantile probabilities summarizing each population.
pub const QUANTILE_PROBS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

/// Conditioning sets for the pairwise CMI terms are truncated to this
/// many top-ranked blanket members, keeping the regressions well-posed
/// at small sample counts.
pub const COND_TRUNCATE: usize = 3;

/// Cap on the D2 grid population size; larger K_i x K_j grids are
/// subsampled (seeded, uniform) to bound the per-pair cost.
pub const D2_CAP: usize = 25;

/// Fixed-length feature vector for the ordered pair (i, j) over dataset
/// column positions, with the label when known.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorVector {
    pub i: usize,
    pub j: usize,
    pub features: Vec<f64>,
    pub label: Option<bool>,
}

/// What a population measures; `a`/`b` are the column positions of the
/// oriented pair the population belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationKind {
    /// Ranks of one blanket's members inside the other's ranking.
    Positions { of: usize, within: usize },
    /// { I(z_a; m | z_b) : m in M_b \ z_a }
    D1 { a: usize, b: usize },
    /// { I(m_a; m_b | z_b) : m_a in M_a \ z_b, m_b in M_b \ z_a }
    D2 { a: usize, b: usize },
    /// { I(z_a; m) : m in M_b \ z_a }
    D3 { a: usize, b: usize },
}

/// A (possibly empty) sample of descriptor values.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub kind: PopulationKind,
    pub values: Vec<f64>,
}

/// Sample quantiles with linear interpolation between order statistics.
/// An empty population yields zeros, the independence-neutral value,
/// keeping the descriptor arity fixed.
pub fn quantile_summary(p: &Population, probs: &[f64]) -> Vec<f64> {
    quantiles_of(&p.values, probs)
}

fn quantiles_of(values: &[f64], probs: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return probs.iter().map(|_| 0.0).collect();
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    probs
        .iter()
        .map(|&p| {
            let h = (n - 1) as f64 * p;
            let lo = h as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = h - lo as f64;
            sorted[lo] + frac * (sorted[hi] - sorted[lo])
        })
        .collect()
}

/// For each member of `of` (already excluding the pair variables), its
/// 1-based rank within `within`, or `len(within) + 1` when absent.
pub fn position_population(
    of: &MarkovBlanketRanking,
    within: &MarkovBlanketRanking,
) -> Population {
    let absent = (within.members.len() + 1) as f64;
    let values = of
        .members
        .iter()
        .map(|m| match within.members.iter().position(|w| w == m) {
            Some(pos) => (pos + 1) as f64,
            None => absent,
        })
        .collect();
    Population {
        kind: PopulationKind::Positions { of: of.target, within: within.target },
        values,
    }
}

/// D1(a, b) = { I(z_a; m | z_b) } over members m of `mb_b` (= M_b \ z_a).
fn d1_population(
    ds: &Dataset,
    a: usize,
    b: usize,
    mb_b: &MarkovBlanketRanking,
    cfg: &EstimatorConfig,
) -> Result<Population> {
    let cond = [ds.col(b)];
    let mut values = Vec::with_capacity(mb_b.members.len());
    for &m in &mb_b.members {
        values.push(cond_mi(ds.col(a), ds.col(m), &cond, cfg)?);
    }
    Ok(Population { kind: PopulationKind::D1 { a, b }, values })
}

/// D2(a, b) = { I(m_a; m_b | z_b) } over the member grid, subsampled to
/// [`D2_CAP`] cells. The subsample substream is keyed by the oriented
/// pair, so the same population is drawn identically no matter which
/// pair orientation asked for it.
fn d2_population(
    ds: &Dataset,
    a: usize,
    b: usize,
    mb_a: &MarkovBlanketRanking,
    mb_b: &MarkovBlanketRanking,
    cfg: &EstimatorConfig,
) -> Result<Population> {
    let ki = mb_a.members.len();
    let kj = mb_b.members.len();
    let grid = ki * kj;
    let cells: Vec<usize> = if grid > D2_CAP {
        let mut r = rng::stream(0, &[tag::D2_GRID, a as u64, b as u64]);
        let mut picked = rng::choose_indices(&mut r, grid, D2_CAP);
        picked.sort_unstable();
        picked
    } else {
        (0..grid).collect()
    };
    let cond = [ds.col(b)];
    let mut values = Vec::with_capacity(cells.len());
    for cell in cells {
        let ma = mb_a.members[cell / kj.max(1)];
        let mb = mb_b.members[cell % kj.max(1)];
        values.push(cond_mi(ds.col(ma), ds.col(mb), &cond, cfg)?);
    }
    Ok(Population { kind: PopulationKind::D2 { a, b }, values })
}

/// D3(a, b) = { I(z_a; m) } over members m of `mb_b`.
fn d3_population(
    ds: &Dataset,
    a: usize,
    b: usize,
    mb_b: &MarkovBlanketRanking,
    cfg: &EstimatorConfig,
) -> Result<Population> {
    let mut values = Vec::with_capacity(mb_b.members.len());
    for &m in &mb_b.members {
        values.push(mi(ds.col(a), ds.col(m), cfg)?);
    }
    Ok(Population { kind: PopulationKind::D3 { a, b }, values })
}

fn truncated_cond<'a>(ds: &'a Dataset, mb: &MarkovBlanketRanking) -> Vec<&'a [f64]> {
    mb.members.iter().take(COND_TRUNCATE).map(|&m| ds.col(m)).collect()
}

/// Compute the full descriptor vector for the ordered pair (i, j).
///
/// Steps: rank both blankets and drop the partner variable from each;
/// estimate the three (conditional) MI terms between z_i and z_j; build
/// the two position populations and the six D populations; concatenate
/// the MI terms with each population's quantile summary.
pub fn compute_descriptor(
    ds: &Dataset,
    i: usize,
    j: usize,
    k: usize,
    filter: MbFilter,
    cfg: &EstimatorConfig,
) -> Result<DescriptorVector> {
    if i == j {
        return Err(Error::BadIndex(format!("pair indices must differ, got ({i}, {j})")));
    }
    if i >= ds.n_cols() || j >= ds.n_cols() {
        return Err(Error::BadIndex(format!(
            "pair ({i}, {j}) out of range for {} columns",
            ds.n_cols()
        )));
    }

    let r_i = rank_features(ds, i, k, filter, cfg)?;
    let r_j = rank_features(ds, j, k, filter, cfg)?;
    let m_i = mb_minus(&r_i, j);
    let m_j = mb_minus(&r_j, i);

    let i0 = mi(ds.col(i), ds.col(j), cfg)?;
    let i1 = cond_mi(ds.col(i), ds.col(j), &truncated_cond(ds, &m_j), cfg)?;
    let i2 = cond_mi(ds.col(i), ds.col(j), &truncated_cond(ds, &m_i), cfg)?;

    let p_i = position_population(&m_i, &m_j);
    let p_j = position_population(&m_j, &m_i);

    let d1_ij = d1_population(ds, i, j, &m_j, cfg)?;
    let d1_ji = d1_population(ds, j, i, &m_i, cfg)?;
    let d2_ij = d2_population(ds, i, j, &m_i, &m_j, cfg)?;
    let d2_ji = d2_population(ds, j, i, &m_j, &m_i, cfg)?;
    let d3_ij = d3_population(ds, i, j, &m_j, cfg)?;
    let d3_ji = d3_population(ds, j, i, &m_i, cfg)?;

    let mut features = Vec::with_capacity(DESCRIPTOR_LEN);
    features.push(i0);
    features.push(i1);
    features.push(i2);
    for pop in [&p_i, &p_j, &d1_ij, &d1_ji, &d2_ij, &d2_ji, &d3_ij, &d3_ji] {
        features.extend(quantile_summary(pop, &QUANTILE_PROBS));
    }
    debug_assert_eq!(features.len(), DESCRIPTOR_LEN);
    if !crate::math::is_finite_slice(&features) {
        return Err(Error::NonFinite(format!("descriptor for pair ({i}, {j})")));
    }

    Ok(DescriptorVector { i, j, features, label: None })
}

/// The deterministic block permutation relating the two orientations of
/// a pair: `compute_descriptor(ds, j, i)` equals
/// `swap_orientation(&compute_descriptor(ds, i, j).features)` bit-exactly.
pub fn swap_orientation(features: &[f64]) -> Vec<f64> {
    debug_assert_eq!(features.len(), DESCRIPTOR_LEN);
    let q = QUANTILE_PROBS.len();
    let mut out = Vec::with_capacity(DESCRIPTOR_LEN);
    out.push(features[0]);
    out.push(features[2]);
    out.push(features[1]);
    // population blocks swap pairwise: (P_i, P_j), (D1 fwd, rev), ...
    for block_pair in 0..4 {
        let first = 3 + 2 * block_pair * q;
        let second = first + q;
        out.extend_from_slice(&features[second..second + q]);
        out.extend_from_slice(&features[first..first + q]);
    }
    out
}

/// Ground-truth asymmetric descriptor populations for a true edge (i, j),
/// in both orientations. `i` and `j` are node indices of `dag`; all
/// participating relatives must be observed in `ds`.
///
/// With c(v) the direct causes and e(v) the direct effects of v (always
/// excluding the partner variable):
///   d1(a, b) = { I(z_a; c | z_b) : c in c(b) }
///   d2(a, b) = { I(e; c | z_b) : e in e(a), c in c(b) }
///   d3(a, b) = { I(c_a; c_b | z_b) : c_a in c(a), c_b in c(b) }
///   d4(a, b) = { I(z_a; c) : c in c(b) }
pub fn oracle_descriptors(
    dag: &Dag,
    ds: &Dataset,
    i: usize,
    j: usize,
    cfg: &EstimatorConfig,
) -> Result<OracleDescriptors> {
    if !dag.is_edge(i, j) {
        return Err(Error::NotAnEdge { i, j });
    }
    let col = |node: usize| -> Result<&[f64]> {
        ds.position_of(node)
            .map(|p| ds.col(p))
            .ok_or_else(|| Error::BadIndex(format!("node {node} is hidden")))
    };
    let relatives = |node: usize, partner: usize| -> (Vec<usize>, Vec<usize>) {
        let causes = dag.parents(node).into_iter().filter(|&v| v != partner).collect();
        let effects = dag.children(node).into_iter().filter(|&v| v != partner).collect();
        (causes, effects)
    };
    let (causes_i, effects_i) = relatives(i, j);
    let (causes_j, effects_j) = relatives(j, i);

    let oriented = |a: usize,
                    b: usize,
                    causes_a: &[usize],
                    causes_b: &[usize],
                    effects_a: &[usize]|
     -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        let za = col(a)?;
        let zb = col(b)?;
        let cond = [zb];
        let mut d1 = Vec::new();
        let mut d4 = Vec::new();
        for &c in causes_b {
            d1.push(cond_mi(za, col(c)?, &cond, cfg)?);
            d4.push(mi(za, col(c)?, cfg)?);
        }
        let mut d2 = Vec::new();
        for &e in effects_a {
            for &c in causes_b {
                d2.push(cond_mi(col(e)?, col(c)?, &cond, cfg)?);
            }
        }
        let mut d3 = Vec::new();
        for &ca in causes_a {
            for &cb in causes_b {
                d3.push(cond_mi(col(ca)?, col(cb)?, &cond, cfg)?);
            }
        }
        Ok((d1, d2, d3, d4))
    };

    let (d1f, d2f, d3f, d4f) = oriented(i, j, &causes_i, &causes_j, &effects_i)?;
    let (d1r, d2r, d3r, d4r) = oriented(j, i, &causes_j, &causes_i, &effects_j)?;
    Ok(OracleDescriptors {
        d1: Oriented { forward: d1f, reverse: d1r },
        d2: Oriented { forward: d2f, reverse: d2r },
        d3: Oriented { forward: d3f, reverse: d3r },
        d4: Oriented { forward: d4f, reverse: d4r },
    })
}

/// Descriptor value sets for the (i, j) and (j, i) orientations.
#[derive(Debug, Clone, PartialEq)]
pub struct Oriented {
    pub forward: Vec<f64>,
    pub reverse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleDescriptors {
    pub d1: Oriented,
    pub d2: Oriented,
    pub d3: Oriented,
    pub d4: Oriented,
}
