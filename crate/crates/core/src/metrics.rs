//! MUC, B³, CEAF-φ4, the CoNLL average, LEA and non-referring F1.
//!
//! Every scorer returns raw numerators and denominators next to the ratios so
//! that corpus scores can be formed by summing documents (micro averaging).
//! Chains are sets of mention keys; for document-level scoring these are the
//! individual-mention spans, with plural mentions left to [`crate::lea_ext`].

use std::collections::{BTreeMap, BTreeSet};
use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::assignment;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricScore {
    pub recall_num: f64,
    pub recall_den: f64,
    pub precision_num: f64,
    pub precision_den: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

/// `num / den`, or 0 when the denominator is 0.
pub fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

impl MetricScore {
    pub fn new(recall_num: f64, recall_den: f64, precision_num: f64, precision_den: f64) -> Self {
        let recall = ratio(recall_num, recall_den);
        let precision = ratio(precision_num, precision_den);
        MetricScore {
            recall_num,
            recall_den,
            precision_num,
            precision_den,
            recall,
            precision,
            f1: f1(precision, recall),
        }
    }

    /// Score with recall and precision exchanged, as when gold and system
    /// swap roles.
    pub fn swapped(&self) -> Self {
        MetricScore::new(
            self.precision_num,
            self.precision_den,
            self.recall_num,
            self.recall_den,
        )
    }
}

impl Add for MetricScore {
    type Output = MetricScore;

    fn add(self, rhs: MetricScore) -> MetricScore {
        MetricScore::new(
            self.recall_num + rhs.recall_num,
            self.recall_den + rhs.recall_den,
            self.precision_num + rhs.precision_num,
            self.precision_den + rhs.precision_den,
        )
    }
}

impl Sum for MetricScore {
    fn sum<I: Iterator<Item = MetricScore>>(iter: I) -> Self {
        iter.fold(MetricScore::default(), Add::add)
    }
}

fn owner<T: Ord + Clone>(chains: &[BTreeSet<T>]) -> BTreeMap<T, usize> {
    let mut map = BTreeMap::new();
    for (i, c) in chains.iter().enumerate() {
        for m in c {
            map.entry(m.clone()).or_insert(i);
        }
    }
    map
}

fn muc_side<T: Ord + Clone>(keys: &[BTreeSet<T>], responses: &[BTreeSet<T>]) -> (f64, f64) {
    let owner = owner(responses);
    let mut num = 0usize;
    let mut den = 0usize;
    for k in keys.iter().filter(|k| k.len() > 1) {
        let mut parts = BTreeSet::new();
        let mut unowned = 0usize;
        for m in k {
            match owner.get(m) {
                Some(&r) => {
                    parts.insert(r);
                }
                None => unowned += 1,
            }
        }
        num += k.len() - (parts.len() + unowned);
        den += k.len() - 1;
    }
    (num as f64, den as f64)
}

/// Link-based MUC. Singleton chains contribute nothing.
pub fn muc<T: Ord + Clone>(gold: &[BTreeSet<T>], sys: &[BTreeSet<T>]) -> MetricScore {
    let (rn, rd) = muc_side(gold, sys);
    let (pn, pd) = muc_side(sys, gold);
    MetricScore::new(rn, rd, pn, pd)
}

fn b_cubed_side<T: Ord>(keys: &[BTreeSet<T>], responses: &[BTreeSet<T>]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let overlap: f64 = responses
            .iter()
            .map(|r| {
                let c = k.intersection(r).count() as f64;
                c * c
            })
            .sum();
        num += overlap / k.len() as f64;
        den += k.len() as f64;
    }
    (num, den)
}

pub fn b_cubed<T: Ord>(gold: &[BTreeSet<T>], sys: &[BTreeSet<T>]) -> MetricScore {
    let (rn, rd) = b_cubed_side(gold, sys);
    let (pn, pd) = b_cubed_side(sys, gold);
    MetricScore::new(rn, rd, pn, pd)
}

/// Entity-level CEAF with φ4 similarity.
pub fn ceaf_phi4<T: Ord>(gold: &[BTreeSet<T>], sys: &[BTreeSet<T>]) -> Result<MetricScore> {
    let weights = gold
        .iter()
        .map(|g| {
            sys.iter()
                .map(|s| assignment::phi4(g, s))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let total = assignment::max_weight_matching(&weights)?.total_similarity;
    Ok(MetricScore::new(
        total,
        gold.len() as f64,
        total,
        sys.len() as f64,
    ))
}

/// Mean of the MUC, B³ and CEAF-φ4 F1 values.
pub fn conll_average(muc: &MetricScore, b3: &MetricScore, ceafe: &MetricScore) -> f64 {
    (muc.f1 + b3.f1 + ceafe.f1) / 3.0
}

pub(crate) fn links(n: usize) -> usize {
    if n == 1 {
        1
    } else {
        n * (n - 1) / 2
    }
}

fn lea_side<T: Ord>(keys: &[BTreeSet<T>], responses: &[BTreeSet<T>]) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let hits = if k.len() == 1 {
            let m = k.iter().next().expect("non-empty");
            usize::from(responses.iter().any(|r| r.contains(m)))
        } else {
            responses
                .iter()
                .map(|r| {
                    let c = k.intersection(r).count();
                    c * c.saturating_sub(1) / 2
                })
                .sum()
        };
        let size = k.len() as f64;
        num += size * (hits as f64 / links(k.len()) as f64);
        den += size;
    }
    (num, den)
}

/// LEA with entity size as importance. A singleton entity has one self-link,
/// resolved when its mention occurs in any entity on the other side.
pub fn lea_standard<T: Ord>(gold: &[BTreeSet<T>], sys: &[BTreeSet<T>]) -> MetricScore {
    let (rn, rd) = lea_side(gold, sys);
    let (pn, pd) = lea_side(sys, gold);
    MetricScore::new(rn, rd, pn, pd)
}

/// Exact-match precision/recall over two key sets.
pub fn non_referring_f1<T: Ord>(gold: &BTreeSet<T>, sys: &BTreeSet<T>) -> MetricScore {
    let hits = gold.intersection(sys).count() as f64;
    MetricScore::new(hits, gold.len() as f64, hits, sys.len() as f64)
}
