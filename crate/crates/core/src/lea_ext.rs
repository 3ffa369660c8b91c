//! LEA over chains that contain plural mentions.
//!
//! Plural mentions are first normalized: every element is replaced by the
//! representative (earliest mention) of a gold chain, found for system plurals
//! through the CEAF-φ4 chain alignment. Links are then rewarded with partial
//! credit when they touch a plural mention that is only partly right:
//!
//! 1. *subset-down*: the largest subsets `s_i ⊆ m_i`, `s_j ⊆ m_j` that occur
//!    together in one entity on the other side earn `|s_i||s_j| / |m_i||m_j|`;
//! 2. *superset-up*: failing that, the smallest mentions `m_k ⊇ m_i`,
//!    `m_p ⊇ m_j` of one entity earn `|m_i||m_j| / |m_k||m_p|`;
//! 3. nothing otherwise.
//!
//! Entities containing a plural mention can be weighted up by `imp_split`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::assignment::align_chains;
use crate::error::{Error, Result, ValidationError};
use crate::metrics::{links, MetricScore};
use crate::model::{ChainId, DocumentAnnotation, MentionId, MentionKind, Side, Span};

/// Largest plural mention whose subsets are enumerated.
pub const MAX_PLURAL_SIZE: usize = 16;

/// A normalized entity representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Representative {
    /// Earliest mention of a gold chain, keyed by its span.
    Gold(Span),
    /// Stand-in for a system chain that aligns to no gold chain. Never equal
    /// to any gold representative.
    Synthetic(ChainId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormalizedMention {
    /// An individual mention. `referents` is set for split-antecedent
    /// anaphors: the normalized antecedents of the matching gold anaphor.
    Atom {
        span: Span,
        referents: Option<BTreeSet<Representative>>,
    },
    SetOf(BTreeSet<Representative>),
}

impl NormalizedMention {
    pub fn atom(span: Span) -> Self {
        NormalizedMention::Atom {
            span,
            referents: None,
        }
    }

    pub fn set_of(elements: BTreeSet<Representative>) -> Result<Self> {
        if elements.len() > MAX_PLURAL_SIZE {
            return Err(Error::PluralTooLarge(elements.len()));
        }
        Ok(NormalizedMention::SetOf(elements))
    }

    pub fn is_plural(&self) -> bool {
        matches!(self, NormalizedMention::SetOf(_))
    }

    /// `|m|`. Atoms count as 1 unless `strict_formula` is set, in which case
    /// an anaphor atom counts its referents.
    pub fn size(&self, strict_formula: bool) -> usize {
        match self {
            NormalizedMention::Atom {
                referents: Some(r), ..
            } if strict_formula => r.len(),
            NormalizedMention::Atom { .. } => 1,
            NormalizedMention::SetOf(e) => e.len(),
        }
    }
}

/// `P̂(m)`: `m` and, for a plural mention, all of its non-empty proper
/// subsets, largest first; equal sizes ordered lexicographically.
pub fn subset_list(m: &NormalizedMention) -> Vec<NormalizedMention> {
    let elements: Vec<Representative> = match m {
        NormalizedMention::Atom { .. } => return vec![m.clone()],
        NormalizedMention::SetOf(e) => e.iter().copied().collect(),
    };
    let n = elements.len();
    let mut subsets: Vec<Vec<Representative>> = (1u32..(1u32 << n))
        .map(|mask| {
            (0..n)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| elements[b])
                .collect()
        })
        .collect();
    subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|s| NormalizedMention::SetOf(s.into_iter().collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedEntity {
    pub chain: ChainId,
    pub mentions: Vec<NormalizedMention>,
}

impl NormalizedEntity {
    /// Contains at least one plural mention.
    pub fn is_plural(&self) -> bool {
        self.mentions.iter().any(NormalizedMention::is_plural)
    }
}

/// Both sides of a document after normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedPair {
    pub gold: Vec<NormalizedEntity>,
    pub system: Vec<NormalizedEntity>,
}

fn validation(side: Side, doc: &DocumentAnnotation, kind: ValidationError) -> Error {
    Error::Validation {
        side,
        doc_id: doc.doc_id.clone(),
        kind,
    }
}

/// Gold representative of every gold chain that has an individual mention.
fn gold_representatives(gold: &DocumentAnnotation) -> BTreeMap<ChainId, Representative> {
    gold.chains
        .iter()
        .filter_map(|c| {
            let rep = gold.representative(c.id)?;
            Some((c.id, Representative::Gold(gold.span_of(rep)?)))
        })
        .collect()
}

/// Normalizes the chains of a materialized document. `element_rep` maps a
/// plural element (a mention id) to its representative.
fn normalize_side(
    doc: &DocumentAnnotation,
    anaphor_referents: &BTreeMap<Span, BTreeSet<Representative>>,
    mut element_rep: impl FnMut(MentionId) -> Result<Representative>,
) -> Result<Vec<NormalizedEntity>> {
    let index = doc.mention_index();
    let mut entities = Vec::with_capacity(doc.chains.len());
    for chain in &doc.chains {
        let mut mentions = Vec::with_capacity(chain.mentions.len());
        for id in &chain.mentions {
            let Some(m) = index.get(id) else { continue };
            let normalized = match &m.kind {
                MentionKind::Individual(span) => NormalizedMention::Atom {
                    span: *span,
                    referents: anaphor_referents.get(span).cloned(),
                },
                MentionKind::Plural { elements, .. } => NormalizedMention::set_of(
                    elements
                        .iter()
                        .map(|&e| element_rep(e))
                        .collect::<Result<BTreeSet<_>>>()?,
                )?,
            };
            mentions.push(normalized);
        }
        if !mentions.is_empty() {
            entities.push(NormalizedEntity {
                chain: chain.id,
                mentions,
            });
        }
    }
    Ok(entities)
}

/// Gold anaphor span → normalized antecedent set.
fn gold_anaphor_referents(
    gold: &DocumentAnnotation,
    reps: &BTreeMap<ChainId, Representative>,
) -> Result<BTreeMap<Span, BTreeSet<Representative>>> {
    let mut out = BTreeMap::new();
    for rel in &gold.split_relations {
        let Some(span) = gold.span_of(rel.anaphor) else {
            continue;
        };
        let referents = rel
            .antecedent_chains
            .iter()
            .map(|c| {
                reps.get(c).copied().ok_or_else(|| {
                    validation(Side::Gold, gold, ValidationError::AntecedentChainWithoutMentions(*c))
                })
            })
            .collect::<Result<BTreeSet<_>>>()?;
        out.entry(span).or_insert(referents);
    }
    Ok(out)
}

/// Normalizes gold and system chains of one document. Plural mentions are
/// materialized first if needed.
pub fn normalize(sys: &DocumentAnnotation, gold: &DocumentAnnotation) -> Result<NormalizedPair> {
    let gold = gold.materialize_plurals()?;
    let sys = sys.materialize_plurals()?;

    let reps = gold_representatives(&gold);
    let referents = gold_anaphor_referents(&gold, &reps)?;

    let gold_chain_of = gold.chain_of_mention();
    let gold_entities = normalize_side(&gold, &referents, |e| {
        gold_chain_of
            .get(&e)
            .and_then(|c| reps.get(c))
            .copied()
            .ok_or_else(|| validation(Side::Gold, &gold, ValidationError::DanglingPluralElement(e)))
    })?;

    let alignment = align_chains(&gold, &sys)?;
    let sys_to_gold = alignment.system_to_gold();
    let sys_chain_of = sys.chain_of_mention();
    let sys_entities = normalize_side(&sys, &referents, |e| {
        let chain = sys_chain_of
            .get(&e)
            .ok_or_else(|| validation(Side::System, &sys, ValidationError::DanglingPluralElement(e)))?;
        Ok(sys_to_gold
            .get(chain)
            .and_then(|g| reps.get(g))
            .copied()
            .unwrap_or(Representative::Synthetic(*chain)))
    })?;

    Ok(NormalizedPair {
        gold: gold_entities,
        system: sys_entities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeaConfig {
    /// Importance factor of entities that contain a plural mention.
    pub imp_split: f64,
    /// Count an anaphor atom by its referents instead of as 1.
    pub strict_formula: bool,
}

impl Default for LeaConfig {
    fn default() -> Self {
        LeaConfig {
            imp_split: 1.0,
            strict_formula: false,
        }
    }
}

impl LeaConfig {
    pub fn new(imp_split: f64, strict_formula: bool) -> Result<Self> {
        if !(imp_split.is_finite() && imp_split > 0.0) {
            return Err(Error::Config(format!(
                "imp_split must be a positive real, got {imp_split}"
            )));
        }
        Ok(LeaConfig {
            imp_split,
            strict_formula,
        })
    }

    pub fn importance_factor(&self, entity: &NormalizedEntity) -> f64 {
        if entity.is_plural() {
            self.imp_split
        } else {
            1.0
        }
    }
}

/// Lookup structure over the entities that links are rewarded against.
#[derive(Debug)]
pub struct RewardIndex<'a> {
    entities: &'a [NormalizedEntity],
    /// span → entities holding an individual mention with that span
    by_span: BTreeMap<Span, Vec<usize>>,
    strict_formula: bool,
}

impl<'a> RewardIndex<'a> {
    pub fn new(entities: &'a [NormalizedEntity], strict_formula: bool) -> Self {
        let mut by_span: BTreeMap<Span, Vec<usize>> = BTreeMap::new();
        for (i, e) in entities.iter().enumerate() {
            for m in &e.mentions {
                if let NormalizedMention::Atom { span, .. } = m {
                    let owners = by_span.entry(*span).or_default();
                    if owners.last() != Some(&i) {
                        owners.push(i);
                    }
                }
            }
        }
        RewardIndex {
            entities,
            by_span,
            strict_formula,
        }
    }

    fn holds_span(&self, entity: usize, span: &Span) -> bool {
        self.by_span
            .get(span)
            .is_some_and(|owners| owners.contains(&entity))
    }

    /// Size of the largest element of `P̂(m)` occurring in `entity`.
    fn largest_subset(&self, m: &NormalizedMention, entity: usize) -> Option<usize> {
        match m {
            NormalizedMention::Atom { span, .. } => self
                .holds_span(entity, span)
                .then(|| m.size(self.strict_formula)),
            NormalizedMention::SetOf(elements) => {
                let mut best = None;
                for g in &self.entities[entity].mentions {
                    if let NormalizedMention::SetOf(f) = g {
                        if !f.is_empty() && f.is_subset(elements) {
                            best = best.max(Some(f.len()));
                        }
                    }
                }
                if best.is_none() {
                    let single = elements.iter().any(|r| match r {
                        Representative::Gold(span) => self.holds_span(entity, span),
                        Representative::Synthetic(_) => false,
                    });
                    if single {
                        best = Some(1);
                    }
                }
                best
            }
        }
    }

    /// Size of the smallest mention of `entity` that contains `m`.
    fn smallest_superset(&self, m: &NormalizedMention, entity: usize) -> Option<usize> {
        let strict = self.strict_formula;
        self.entities[entity]
            .mentions
            .iter()
            .filter(|g| contains(g, m))
            .map(|g| g.size(strict))
            .min()
    }

    /// Reward of the link between `m_i` and `m_j`, in `[0, 1]`.
    pub fn link_reward(&self, m_i: &NormalizedMention, m_j: &NormalizedMention) -> f64 {
        let strict = self.strict_formula;
        let denom = (m_i.size(strict) * m_j.size(strict)) as f64;

        let candidates: Vec<usize> = match (m_i, m_j) {
            (NormalizedMention::Atom { span, .. }, _) | (_, NormalizedMention::Atom { span, .. })
                if !(m_i.is_plural() && m_j.is_plural()) =>
            {
                self.by_span.get(span).cloned().unwrap_or_default()
            }
            _ => (0..self.entities.len()).collect(),
        };

        let subset_down = candidates
            .iter()
            .filter_map(|&k| {
                let a = self.largest_subset(m_i, k)?;
                let b = self.largest_subset(m_j, k)?;
                Some((a * b) as f64 / denom)
            })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        if let Some(reward) = subset_down {
            return reward;
        }

        // partial credit upwards only applies to links touching a plural mention
        if !(m_i.is_plural() || m_j.is_plural()) {
            return 0.0;
        }
        (0..self.entities.len())
            .filter_map(|k| {
                let a = self.smallest_superset(m_i, k)?;
                let b = self.smallest_superset(m_j, k)?;
                Some(denom / (a * b) as f64)
            })
            .fold(0.0, f64::max)
    }
}

/// Whether gold-side mention `g` contains `m`: element inclusion for plural
/// mentions; for an atom, span identity or inclusion of its referents in
/// those of an anaphor atom.
fn contains(g: &NormalizedMention, m: &NormalizedMention) -> bool {
    match (m, g) {
        (NormalizedMention::SetOf(e), NormalizedMention::SetOf(f)) => e.is_subset(f),
        (
            NormalizedMention::Atom {
                span: a,
                referents: ra,
            },
            NormalizedMention::Atom {
                span: b,
                referents: rb,
            },
        ) => {
            a == b
                || match (ra, rb) {
                    (Some(ra), Some(rb)) => ra.is_subset(rb),
                    _ => false,
                }
        }
        _ => false,
    }
}

/// Convenience wrapper building a [`RewardIndex`] for a single query.
pub fn link_reward(
    m_i: &NormalizedMention,
    m_j: &NormalizedMention,
    other: &[NormalizedEntity],
    cfg: &LeaConfig,
) -> f64 {
    RewardIndex::new(other, cfg.strict_formula).link_reward(m_i, m_j)
}

/// Per-entity breakdown of one side of the extended LEA computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityScore {
    pub chain: ChainId,
    pub size: usize,
    pub plural: bool,
    pub importance_factor: f64,
    /// Normalized importance; sums to 1 over the entities of one side.
    pub importance: f64,
    pub resolution_score: f64,
}

fn resolution_score(entity: &NormalizedEntity, index: &RewardIndex<'_>) -> f64 {
    let ms = &entity.mentions;
    let total: f64 = if ms.len() == 1 {
        index.link_reward(&ms[0], &ms[0])
    } else {
        let mut sum = 0.0;
        for i in 0..ms.len() {
            for j in i + 1..ms.len() {
                sum += index.link_reward(&ms[i], &ms[j]);
            }
        }
        sum
    };
    total / links(ms.len()) as f64
}

/// Scores `keys` against `responses`; returns numerator, denominator and the
/// per-entity rows.
fn side(
    keys: &[NormalizedEntity],
    responses: &[NormalizedEntity],
    cfg: &LeaConfig,
) -> (f64, f64, Vec<EntityScore>) {
    let index = RewardIndex::new(responses, cfg.strict_formula);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut rows = Vec::with_capacity(keys.len());
    for e in keys {
        let rs = resolution_score(e, &index);
        let factor = cfg.importance_factor(e);
        let weight = factor * e.mentions.len() as f64;
        num += weight * rs;
        den += weight;
        rows.push(EntityScore {
            chain: e.chain,
            size: e.mentions.len(),
            plural: e.is_plural(),
            importance_factor: factor,
            importance: weight,
            resolution_score: rs,
        });
    }
    for row in &mut rows {
        row.importance /= den;
    }
    (num, den, rows)
}

/// Extended LEA with its per-entity breakdown: (score, gold rows, system rows).
pub fn lea_extended_detailed(
    gold: &[NormalizedEntity],
    sys: &[NormalizedEntity],
    cfg: &LeaConfig,
) -> (MetricScore, Vec<EntityScore>, Vec<EntityScore>) {
    let (rn, rd, gold_rows) = side(gold, sys, cfg);
    let (pn, pd, sys_rows) = side(sys, gold, cfg);
    (MetricScore::new(rn, rd, pn, pd), gold_rows, sys_rows)
}

/// Extended LEA. Numerator and denominator carry the unnormalized weights
/// `factor·|e|`; the normalizing constant cancels in their ratio, and keeping
/// it out lets documents be summed into a corpus score.
pub fn lea_extended(gold: &[NormalizedEntity], sys: &[NormalizedEntity], cfg: &LeaConfig) -> MetricScore {
    lea_extended_detailed(gold, sys, cfg).0
}

/// Normalizes and scores one document pair.
pub fn score_document(
    gold: &DocumentAnnotation,
    sys: &DocumentAnnotation,
    cfg: &LeaConfig,
) -> Result<MetricScore> {
    let pair = normalize(sys, gold)?;
    Ok(lea_extended(&pair.gold, &pair.system, cfg))
}
