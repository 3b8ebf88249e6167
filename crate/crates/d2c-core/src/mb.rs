//! Ranked Markov-blanket approximation via information-theoretic filters.
//!
//! `mi` ranks candidates by estimated relevance alone; `mrmr` and `mimr`
//! select greedily, penalizing redundancy with already-selected members
//! (`mimr` additionally rewards candidate pairs whose interaction with
//! the target is high, which tends to pull direct causes forward).

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estimator::{cond_mi, mi, EstimatorConfig};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MbFilter {
    Mi,
    Mrmr,
    Mimr,
}

/// Ordered candidate blanket for one target column. `members` are column
/// positions in selection order; `scores` are the per-selection-step
/// filter scores (not necessarily monotone for mrmr/mimr).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBlanketRanking {
    pub target: usize,
    pub members: Vec<usize>,
    pub scores: Vec<f64>,
    /// Requested blanket size (the ranking may be shorter if fewer
    /// candidates exist).
    pub k: usize,
}

/// Default requested blanket size for a dataset with `n_cols` columns.
pub fn default_blanket_size(n_cols: usize) -> usize {
    10.min(n_cols.saturating_sub(2)).max(1)
}

/// Rank candidate blanket members for `target`. Zero-variance candidate
/// columns are skipped; a `k` beyond the number of candidates truncates.
/// Ties break by ascending column position, so the result is fully
/// deterministic.
pub fn rank_features(
    ds: &Dataset,
    target: usize,
    k: usize,
    filter: MbFilter,
    cfg: &EstimatorConfig,
) -> Result<MarkovBlanketRanking> {
    if target >= ds.n_cols() {
        return Err(Error::BadIndex(format!("target column {target} out of range")));
    }
    if k == 0 {
        return Err(Error::Config("blanket size k must be at least 1".to_string()));
    }
    cfg.validate()?;

    let t = ds.col(target);
    let candidates: Vec<usize> = (0..ds.n_cols())
        .filter(|&c| c != target && math::variance(ds.col(c)) > 1e-12)
        .collect();

    let mut relevance = Vec::with_capacity(candidates.len());
    for &c in &candidates {
        relevance.push(mi(ds.col(c), t, cfg)?);
    }

    let take = k.min(candidates.len());
    let (members, scores) = match filter {
        MbFilter::Mi => {
            let mut order: Vec<usize> = (0..candidates.len()).collect();
            order.sort_unstable_by(|&a, &b| {
                relevance[b]
                    .total_cmp(&relevance[a])
                    .then(candidates[a].cmp(&candidates[b]))
            });
            order.truncate(take);
            (
                order.iter().map(|&p| candidates[p]).collect::<Vec<_>>(),
                order.iter().map(|&p| relevance[p]).collect::<Vec<_>>(),
            )
        }
        MbFilter::Mrmr | MbFilter::Mimr => {
            greedy_select(ds, t, &candidates, &relevance, take, filter, cfg)?
        }
    };

    Ok(MarkovBlanketRanking { target, members, scores, k: take })
}

/// Greedy forward selection. Step score for candidate x with selected set S:
///   mrmr: J(x) = I(x; t) - mean_{s in S} I(x; s)
///   mimr: J(x) = I(x; t) - mean_{s in S} [ I(x; s) - (I(x; t | s) - I(x; t)) ]
fn greedy_select(
    ds: &Dataset,
    t: &[f64],
    candidates: &[usize],
    relevance: &[f64],
    take: usize,
    filter: MbFilter,
    cfg: &EstimatorConfig,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let m = candidates.len();
    let mut selected: Vec<usize> = Vec::with_capacity(take); // positions into candidates
    let mut scores: Vec<f64> = Vec::with_capacity(take);
    let mut remaining: Vec<usize> = (0..m).collect();
    // penalty[c] accumulates sum_{s in S} of the per-pair penalty term
    let mut penalty = alloc::vec![0.0; m];

    while selected.len() < take {
        let mut best: Option<(f64, usize)> = None;
        for &c in &remaining {
            let j = if selected.is_empty() {
                relevance[c]
            } else {
                relevance[c] - penalty[c] / selected.len() as f64
            };
            let better = match best {
                None => true,
                Some((bj, bc)) => {
                    j > bj || (j == bj && candidates[c] < candidates[bc])
                }
            };
            if better {
                best = Some((j, c));
            }
        }
        let (j, chosen) = best.expect("remaining nonempty while selected < take");
        selected.push(chosen);
        scores.push(j);
        remaining.retain(|&c| c != chosen);

        // fold the newly selected member into every remaining penalty
        let s_col = ds.col(candidates[chosen]);
        for &c in &remaining {
            let x_col = ds.col(candidates[c]);
            let redundancy = mi(x_col, s_col, cfg)?;
            let term = match filter {
                MbFilter::Mrmr => redundancy,
                MbFilter::Mimr => {
                    let interaction = cond_mi(x_col, t, &[s_col], cfg)? - relevance[c];
                    redundancy - interaction
                }
                MbFilter::Mi => unreachable!(),
            };
            penalty[c] += term;
        }
    }
    Ok((selected.iter().map(|&p| candidates[p]).collect(), scores))
}

/// The ranking with `exclude` removed; order preserved, requested size
/// decremented iff the member was present.
pub fn mb_minus(r: &MarkovBlanketRanking, exclude: usize) -> MarkovBlanketRanking {
    let mut members = Vec::with_capacity(r.members.len());
    let mut scores = Vec::with_capacity(r.scores.len());
    let mut removed = false;
    for (pos, &m) in r.members.iter().enumerate() {
        if m == exclude {
            removed = true;
        } else {
            members.push(m);
            scores.push(r.scores[pos]);
        }
    }
    MarkovBlanketRanking {
        target: r.target,
        members,
        scores,
        k: if removed { r.k.saturating_sub(1) } else { r.k },
    }
}
