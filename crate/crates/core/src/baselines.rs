//! Heuristic and random split-antecedent baselines on top of a system output.
//!
//! Anaphors are recognized as discourse-new mentions whose surface form is a
//! plural pronoun. Antecedents are then either the `x` most recent singular
//! clusters or a random draw of two to five of them.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ChainId, DocumentAnnotation, MentionId, Side, SplitRelation};

pub const DEFAULT_PRONOUNS: [&str; 7] = ["they", "their", "them", "we", "us", "our", "both"];

pub const MIN_ANTECEDENTS: usize = 2;
pub const MAX_ANTECEDENTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineModel {
    Recent { x: usize },
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineConfig {
    pub model: BaselineModel,
    /// Lowercased surface forms treated as split-antecedent anaphors.
    pub pronouns: BTreeSet<String>,
}

impl BaselineConfig {
    pub fn new(model: BaselineModel) -> Result<Self> {
        if let BaselineModel::Recent { x: 0 } = model {
            return Err(Error::Config("recent-x baseline needs x >= 1".into()));
        }
        Ok(BaselineConfig {
            model,
            pronouns: DEFAULT_PRONOUNS.iter().map(|p| p.to_string()).collect(),
        })
    }

    pub fn with_pronouns<I, S>(mut self, pronouns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.pronouns = pronouns
            .into_iter()
            .map(|p| p.as_ref().trim().to_lowercase())
            .filter(|p| !p.is_empty())
            .collect();
        self
    }
}

/// Discourse-new mentions whose lowercased surface form is in `pronouns`.
pub fn recognize_heuristic(sys: &DocumentAnnotation, pronouns: &BTreeSet<String>) -> BTreeSet<MentionId> {
    sys.discourse_new()
        .into_iter()
        .filter(|&id| sys.surface(id).is_some_and(|s| pronouns.contains(&s)))
        .collect()
}

/// Singular clusters with a mention ending at or before the anaphor, and the
/// distance from the end of their closest such mention to the anaphor start.
/// Chains holding any of `anaphors` or a plural mention are not singular.
fn preceding_clusters(
    sys: &DocumentAnnotation,
    anaphor: MentionId,
    anaphors: &BTreeSet<MentionId>,
) -> Vec<(usize, ChainId)> {
    let Some(anchor) = sys.span_of(anaphor) else {
        return Vec::new();
    };
    let index = sys.mention_index();
    let mut out = Vec::new();
    for chain in &sys.chains {
        let plural = chain.mentions.iter().any(|m| {
            anaphors.contains(m) || index.get(m).is_some_and(|mention| mention.is_plural())
        });
        if plural {
            continue;
        }
        let closest_end = chain
            .mentions
            .iter()
            .filter_map(|m| index.get(m).and_then(|mention| mention.span()))
            .filter(|s| s.end <= anchor.start)
            .map(|s| s.end)
            .max();
        if let Some(end) = closest_end {
            out.push((anchor.start - end, chain.id));
        }
    }
    out
}

fn in_document_order(sys: &DocumentAnnotation, anaphors: &BTreeSet<MentionId>) -> Vec<MentionId> {
    let mut ordered: Vec<_> = anaphors
        .iter()
        .filter_map(|&a| sys.span_of(a).map(|s| (s, a)))
        .collect();
    ordered.sort();
    ordered.into_iter().map(|(_, a)| a).collect()
}

/// The `x` nearest preceding singular clusters of every anaphor (at most
/// five), in document order. Anaphors with fewer than two candidates get no
/// relation.
pub fn recent_x(sys: &DocumentAnnotation, anaphors: &BTreeSet<MentionId>, x: usize) -> Vec<SplitRelation> {
    let take = x.min(MAX_ANTECEDENTS);
    in_document_order(sys, anaphors)
        .into_iter()
        .filter_map(|anaphor| {
            let mut candidates = preceding_clusters(sys, anaphor, anaphors);
            candidates.sort();
            candidates.truncate(take);
            // nearest first, emitted in document order
            candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let chosen: Vec<ChainId> = candidates.into_iter().map(|(_, c)| c).collect();
            (chosen.len() >= MIN_ANTECEDENTS).then_some(SplitRelation {
                anaphor,
                antecedent_chains: chosen,
            })
        })
        .collect()
}

/// FNV-1a, used to derive a per-document stream from the user seed.
fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Per-document generator: ChaCha8 seeded with `seed ^ fnv1a64(doc_id)`.
pub fn document_rng(seed: u64, doc_id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stable_hash(doc_id))
}

/// Two to five random preceding singular clusters per anaphor, drawn without
/// replacement. Output depends only on the document and `seed`.
pub fn random_antecedents(
    sys: &DocumentAnnotation,
    anaphors: &BTreeSet<MentionId>,
    seed: u64,
) -> Vec<SplitRelation> {
    let mut rng = document_rng(seed, &sys.doc_id);
    let mut out = Vec::new();
    for anaphor in in_document_order(sys, anaphors) {
        let mut candidates: Vec<ChainId> = preceding_clusters(sys, anaphor, anaphors)
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        if candidates.len() < MIN_ANTECEDENTS {
            continue;
        }
        candidates.sort();
        let k = rng
            .gen_range(MIN_ANTECEDENTS..=MAX_ANTECEDENTS)
            .min(candidates.len());
        let mut picked: Vec<ChainId> = index::sample(&mut rng, candidates.len(), k)
            .into_iter()
            .map(|i| candidates[i])
            .collect();
        picked.sort();
        out.push(SplitRelation {
            anaphor,
            antecedent_chains: picked,
        });
    }
    out
}

/// Replaces the split relations of `sys` with the baseline's predictions.
pub fn apply(sys: &DocumentAnnotation, cfg: &BaselineConfig) -> Result<DocumentAnnotation> {
    let anaphors = recognize_heuristic(sys, &cfg.pronouns);
    let relations = match cfg.model {
        BaselineModel::Recent { x } => recent_x(sys, &anaphors, x),
        BaselineModel::Random { seed } => random_antecedents(sys, &anaphors, seed),
    };
    let mut out = sys.clone();
    out.split_relations = relations;
    out.validate(Side::System)?;
    Ok(out)
}

/// How often each chain was chosen, for diagnostics.
pub fn selection_counts(relations: &[SplitRelation]) -> BTreeMap<ChainId, usize> {
    let mut counts = BTreeMap::new();
    for r in relations {
        for &c in &r.antecedent_chains {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    counts
}
