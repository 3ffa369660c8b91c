//! Chain similarity and optimal one-to-one alignment between gold and system
//! chains.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChainId, DocumentAnnotation, Span};

/// Entity similarity `2|K ∩ R| / (|K| + |R|)`.
pub fn phi4<T: Ord>(gold: &BTreeSet<T>, sys: &BTreeSet<T>) -> Result<f64> {
    if gold.is_empty() || sys.is_empty() {
        return Err(Error::EmptyChain);
    }
    let common = gold.intersection(sys).count();
    Ok(2.0 * common as f64 / (gold.len() + sys.len()) as f64)
}

/// Matching over matrix indices. Only pairs with positive weight are reported.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    pub pairs: Vec<(usize, usize)>,
    pub total_similarity: f64,
    pub unmatched_gold: Vec<usize>,
    pub unmatched_system: Vec<usize>,
}

/// Maximum-weight bipartite matching of `weights` (gold rows × system
/// columns) with the Hungarian method on a zero-padded square matrix.
///
/// Scans rows and columns in index order and only replaces a candidate on a
/// strictly better value, so ties resolve towards lower indices and the
/// result is bit-identical across runs.
pub fn max_weight_matching(weights: &[Vec<f64>]) -> Result<AlignmentResult> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    for (r, row) in weights.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Config(format!(
                "ragged weight matrix: row {r} has {} columns, expected {cols}",
                row.len()
            )));
        }
        for (c, &w) in row.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight {
                    row: r,
                    col: c,
                    value: w,
                });
            }
        }
    }

    let n = rows.max(cols);
    let weight = |r: usize, c: usize| -> f64 {
        if r < rows && c < cols {
            weights[r][c]
        } else {
            0.0
        }
    };
    let max_w = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| weights[r][c])
        .fold(0.0_f64, f64::max);

    let assignment = hungarian(n, |r, c| max_w - weight(r, c));

    let mut pairs = Vec::new();
    let mut total = 0.0;
    let mut matched_cols = BTreeSet::new();
    for (r, &c) in assignment.iter().enumerate().take(rows) {
        if c < cols && weights[r][c] > 0.0 {
            pairs.push((r, c));
            total += weights[r][c];
            matched_cols.insert(c);
        }
    }
    let matched_rows: BTreeSet<usize> = pairs.iter().map(|&(r, _)| r).collect();
    Ok(AlignmentResult {
        unmatched_gold: (0..rows).filter(|r| !matched_rows.contains(r)).collect(),
        unmatched_system: (0..cols).filter(|c| !matched_cols.contains(c)).collect(),
        pairs,
        total_similarity: total,
    })
}

/// Square min-cost assignment (shortest augmenting paths with potentials).
/// Returns the column assigned to each row.
fn hungarian(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    // p[j]: row matched to column j (1-based, 0 = none)
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedPair {
    pub gold: ChainId,
    pub system: ChainId,
    pub phi4: f64,
}

/// Alignment between the chains of a gold and a system document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainAlignment {
    pub pairs: Vec<AlignedPair>,
    pub total_similarity: f64,
    pub unmatched_gold: Vec<ChainId>,
    pub unmatched_system: Vec<ChainId>,
}

impl ChainAlignment {
    pub fn system_to_gold(&self) -> BTreeMap<ChainId, ChainId> {
        self.pairs.iter().map(|p| (p.system, p.gold)).collect()
    }

    pub fn gold_to_system(&self) -> BTreeMap<ChainId, ChainId> {
        self.pairs.iter().map(|p| (p.gold, p.system)).collect()
    }
}

/// CEAF-φ4 alignment of two keyed chain lists.
pub fn align<K: Copy, T: Ord>(
    gold: &[(K, BTreeSet<T>)],
    sys: &[(K, BTreeSet<T>)],
) -> Result<(AlignmentResult, Vec<Vec<f64>>)> {
    let weights = gold
        .iter()
        .map(|(_, g)| {
            sys.iter()
                .map(|(_, s)| phi4(g, s))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((max_weight_matching(&weights)?, weights))
}

/// Aligns the chains of two documents on their individual-mention spans.
/// Chains consisting only of plural mentions take no part.
pub fn align_chains(gold: &DocumentAnnotation, sys: &DocumentAnnotation) -> Result<ChainAlignment> {
    let gold_chains: Vec<(ChainId, BTreeSet<Span>)> = gold.span_chains();
    let sys_chains: Vec<(ChainId, BTreeSet<Span>)> = sys.span_chains();
    let (result, weights) = align(&gold_chains, &sys_chains)?;

    let matched_gold: BTreeSet<ChainId> = result.pairs.iter().map(|&(g, _)| gold_chains[g].0).collect();
    let matched_sys: BTreeSet<ChainId> = result.pairs.iter().map(|&(_, s)| sys_chains[s].0).collect();
    Ok(ChainAlignment {
        pairs: result
            .pairs
            .iter()
            .map(|&(g, s)| AlignedPair {
                gold: gold_chains[g].0,
                system: sys_chains[s].0,
                phi4: weights[g][s],
            })
            .collect(),
        total_similarity: result.total_similarity,
        unmatched_gold: gold
            .chains
            .iter()
            .map(|c| c.id)
            .filter(|id| !matched_gold.contains(id))
            .collect(),
        unmatched_system: sys
            .chains
            .iter()
            .map(|c| c.id)
            .filter(|id| !matched_sys.contains(id))
            .collect(),
    })
}
