//! Scoring of split-antecedent anaphors on their own: anaphor recognition,
//! lenient (per antecedent) and strict (per anaphor) resolution scores.
//!
//! Predicted antecedent chains are mapped to gold chains through the CEAF-φ4
//! alignment, so a system that splits or merges chains is judged by the gold
//! chain each of its chains stands in for.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Add;

use serde::Serialize;

use crate::assignment::align_chains;
use crate::error::Result;
use crate::metrics::{ratio, MetricScore};
use crate::model::{ChainId, DocumentAnnotation, Span};

/// One gold anaphor and how well the system resolved it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnaphorRow {
    pub span: Span,
    pub matched: bool,
    pub gold_antecedents: usize,
    pub predicted_antecedents: usize,
    pub correct_antecedents: usize,
}

impl AnaphorRow {
    pub fn strict_correct(&self) -> bool {
        self.matched
            && self.correct_antecedents == self.gold_antecedents
            && self.predicted_antecedents == self.gold_antecedents
    }
}

/// Additive counts behind the split scores; documents are summed before any
/// ratio is taken.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SplitCounts {
    pub gold_anaphors: usize,
    pub system_anaphors: usize,
    pub matched_anaphors: usize,
    pub gold_antecedents: usize,
    pub system_antecedents: usize,
    pub correct_antecedents: usize,
    pub strict_correct: usize,
    /// Σ over gold anaphors of correct / gold antecedents.
    pub anaphor_recall_sum: f64,
    /// Σ over system anaphors of correct / predicted antecedents.
    pub anaphor_precision_sum: f64,
}

impl Add for SplitCounts {
    type Output = SplitCounts;

    fn add(self, o: SplitCounts) -> SplitCounts {
        SplitCounts {
            gold_anaphors: self.gold_anaphors + o.gold_anaphors,
            system_anaphors: self.system_anaphors + o.system_anaphors,
            matched_anaphors: self.matched_anaphors + o.matched_anaphors,
            gold_antecedents: self.gold_antecedents + o.gold_antecedents,
            system_antecedents: self.system_antecedents + o.system_antecedents,
            correct_antecedents: self.correct_antecedents + o.correct_antecedents,
            strict_correct: self.strict_correct + o.strict_correct,
            anaphor_recall_sum: self.anaphor_recall_sum + o.anaphor_recall_sum,
            anaphor_precision_sum: self.anaphor_precision_sum + o.anaphor_precision_sum,
        }
    }
}

/// Result of matching the split relations of one document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntecedentMatch {
    pub counts: SplitCounts,
    pub rows: Vec<AnaphorRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitEvalReport {
    pub recognition: MetricScore,
    pub lenient: MetricScore,
    pub strict: MetricScore,
    /// Lenient score averaged per anaphor instead of per antecedent.
    pub lenient_macro: MetricScore,
    pub per_anaphor: Vec<AnaphorRow>,
}

fn anaphor_spans(doc: &DocumentAnnotation) -> BTreeSet<Span> {
    doc.split_relations
        .iter()
        .filter_map(|r| doc.span_of(r.anaphor))
        .collect()
}

/// Exact-span precision/recall of the anaphors themselves.
pub fn recognition_f1(gold: &DocumentAnnotation, sys: &DocumentAnnotation) -> MetricScore {
    recognition_from(&match_counts_only(gold, sys))
}

fn match_counts_only(gold: &DocumentAnnotation, sys: &DocumentAnnotation) -> SplitCounts {
    let g = anaphor_spans(gold);
    let s = anaphor_spans(sys);
    SplitCounts {
        gold_anaphors: g.len(),
        system_anaphors: s.len(),
        matched_anaphors: g.intersection(&s).count(),
        ..SplitCounts::default()
    }
}

fn recognition_from(c: &SplitCounts) -> MetricScore {
    let hits = c.matched_anaphors as f64;
    MetricScore::new(hits, c.gold_anaphors as f64, hits, c.system_anaphors as f64)
}

/// Pairs gold and system anaphors by span and counts, per pair, the predicted
/// antecedent chains whose aligned gold chain is a gold antecedent.
pub fn antecedent_match(gold: &DocumentAnnotation, sys: &DocumentAnnotation) -> Result<AntecedentMatch> {
    let alignment = align_chains(gold, sys)?;
    let sys_to_gold = alignment.system_to_gold();

    let mut predicted: BTreeMap<Span, &[ChainId]> = BTreeMap::new();
    let mut counts = SplitCounts::default();
    for rel in &sys.split_relations {
        let Some(span) = sys.span_of(rel.anaphor) else { continue };
        if predicted.contains_key(&span) {
            continue;
        }
        predicted.insert(span, &rel.antecedent_chains);
        counts.system_anaphors += 1;
        counts.system_antecedents += rel.antecedent_chains.len();
    }

    let mut rows = Vec::with_capacity(gold.split_relations.len());
    let mut claimed_spans = BTreeSet::new();
    for rel in &gold.split_relations {
        let Some(span) = gold.span_of(rel.anaphor) else { continue };
        let gold_list: BTreeSet<ChainId> = rel.antecedent_chains.iter().copied().collect();
        let prediction = if claimed_spans.insert(span) {
            predicted.get(&span).copied()
        } else {
            None
        };
        let (matched, predicted_count, correct) = match prediction {
            Some(chains) => {
                // the alignment is injective, so each gold chain is claimed at most once
                let aligned: BTreeSet<ChainId> =
                    chains.iter().filter_map(|c| sys_to_gold.get(c).copied()).collect();
                (true, chains.len(), aligned.intersection(&gold_list).count())
            }
            None => (false, 0, 0),
        };
        counts.gold_anaphors += 1;
        counts.gold_antecedents += gold_list.len();
        counts.correct_antecedents += correct;
        counts.anaphor_recall_sum += ratio(correct as f64, gold_list.len() as f64);
        if matched {
            counts.matched_anaphors += 1;
            counts.anaphor_precision_sum += ratio(correct as f64, predicted_count as f64);
        }
        let row = AnaphorRow {
            span,
            matched,
            gold_antecedents: gold_list.len(),
            predicted_antecedents: predicted_count,
            correct_antecedents: correct,
        };
        if row.strict_correct() {
            counts.strict_correct += 1;
        }
        rows.push(row);
    }
    Ok(AntecedentMatch { counts, rows })
}

/// Lenient (micro over antecedent links) and strict (per anaphor) scores.
pub fn lenient_strict_f1(c: &SplitCounts) -> (MetricScore, MetricScore) {
    let correct = c.correct_antecedents as f64;
    let lenient = MetricScore::new(
        correct,
        c.gold_antecedents as f64,
        correct,
        c.system_antecedents as f64,
    );
    let strict_hits = c.strict_correct as f64;
    let strict = MetricScore::new(
        strict_hits,
        c.gold_anaphors as f64,
        strict_hits,
        c.system_anaphors as f64,
    );
    (lenient, strict)
}

fn lenient_macro(c: &SplitCounts) -> MetricScore {
    MetricScore::new(
        c.anaphor_recall_sum,
        c.gold_anaphors as f64,
        c.anaphor_precision_sum,
        c.system_anaphors as f64,
    )
}

impl SplitEvalReport {
    pub fn from_counts(counts: &SplitCounts, per_anaphor: Vec<AnaphorRow>) -> Self {
        let (lenient, strict) = lenient_strict_f1(counts);
        SplitEvalReport {
            recognition: recognition_from(counts),
            lenient,
            strict,
            lenient_macro: lenient_macro(counts),
            per_anaphor,
        }
    }
}

/// Full split evaluation of one document.
pub fn evaluate(gold: &DocumentAnnotation, sys: &DocumentAnnotation) -> Result<SplitEvalReport> {
    let m = antecedent_match(gold, sys)?;
    Ok(SplitEvalReport::from_counts(&m.counts, m.rows))
}
