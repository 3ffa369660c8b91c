//! Incremental cluster-ranking decoder over externally supplied score tables.
//!
//! Candidates are pruned by mention score, then visited left to right. Each
//! one is discarded (NO), marked non-referring (NR), opens a cluster (DN) or
//! joins an existing cluster, whichever scores highest:
//!
//! ```text
//! s(i, NO) = s_no(i)
//! s(i, NR) = s_nr(i) + s_m(i)
//! s(i, DN) = s_dn(i) + s_m(i)
//! s(i, c)  = s_m(i) + s_c(c) + s_mc(i, c)
//! ```
//!
//! `s_c` is the mean mention score of the cluster's members and `s_mc(i, c)`
//! the best pairwise score against any member. Discourse-new mentions may
//! then take two to five earlier clusters as split antecedents when
//! `sigmoid(s_m(i) + s_c(c) + s_pmc(i, c))` clears the threshold.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Chain, ChainId, DocumentAnnotation, Mention, MentionId, Span, SplitRelation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub start: usize,
    pub end: usize,
    pub s_m: f64,
    pub s_no: f64,
    pub s_nr: f64,
    pub s_dn: f64,
}

impl Candidate {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub s_mc: f64,
    pub s_pmc: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PairRecord {
    i: usize,
    j: usize,
    s_mc: f64,
    s_pmc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScoreRecord {
    doc_id: String,
    tokens: usize,
    #[serde(default)]
    candidates: Vec<Candidate>,
    #[serde(default)]
    pairwise: Vec<PairRecord>,
}

/// Scores for one document. `pairwise` is keyed by (later, earlier)
/// candidate index; absent pairs cannot be linked.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub doc_id: String,
    pub token_count: usize,
    pub candidates: Vec<Candidate>,
    pub pairwise: BTreeMap<(usize, usize), PairScore>,
}

impl ScoreTable {
    pub fn new(
        doc_id: impl Into<String>,
        token_count: usize,
        candidates: Vec<Candidate>,
        pairwise: BTreeMap<(usize, usize), PairScore>,
    ) -> Result<Self> {
        let table = ScoreTable {
            doc_id: doc_id.into(),
            token_count,
            candidates,
            pairwise,
        };
        table.validate()?;
        Ok(table)
    }

    fn invalid(&self, message: String) -> Error {
        Error::ScoreTable {
            doc_id: self.doc_id.clone(),
            message,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.candidates.iter().enumerate() {
            if c.start >= c.end || c.end > self.token_count {
                return Err(self.invalid(format!(
                    "candidate {i} span [{}, {}) outside 0..{}",
                    c.start, c.end, self.token_count
                )));
            }
            if ![c.s_m, c.s_no, c.s_nr, c.s_dn].iter().all(|s| s.is_finite()) {
                return Err(self.invalid(format!("candidate {i} has a non-finite score")));
            }
        }
        for (&(i, j), p) in &self.pairwise {
            if j >= i || i >= self.candidates.len() {
                return Err(self.invalid(format!(
                    "pair ({i}, {j}) must satisfy j < i < {}",
                    self.candidates.len()
                )));
            }
            if !(p.s_mc.is_finite() && p.s_pmc.is_finite()) {
                return Err(self.invalid(format!("pair ({i}, {j}) has a non-finite score")));
            }
        }
        Ok(())
    }

    pub fn from_json(line: &str) -> Result<Self> {
        let record: ScoreRecord = serde_json::from_str(line)?;
        let mut pairwise = BTreeMap::new();
        for p in &record.pairwise {
            let prev = pairwise.insert(
                (p.i, p.j),
                PairScore {
                    s_mc: p.s_mc,
                    s_pmc: p.s_pmc,
                },
            );
            if prev.is_some() {
                return Err(Error::ScoreTable {
                    doc_id: record.doc_id.clone(),
                    message: format!("pair ({}, {}) listed twice", p.i, p.j),
                });
            }
        }
        ScoreTable::new(record.doc_id, record.tokens, record.candidates, pairwise)
    }

    pub fn to_json(&self) -> Result<String> {
        let record = ScoreRecord {
            doc_id: self.doc_id.clone(),
            tokens: self.token_count,
            candidates: self.candidates.clone(),
            pairwise: self
                .pairwise
                .iter()
                .map(|(&(i, j), p)| PairRecord {
                    i,
                    j,
                    s_mc: p.s_mc,
                    s_pmc: p.s_pmc,
                })
                .collect(),
        };
        Ok(serde_json::to_string(&record)?)
    }

    fn pair(&self, i: usize, j: usize) -> Option<&PairScore> {
        self.pairwise.get(&(i, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoderConfig {
    pub mention_ratio: f64,
    pub max_clusters: usize,
    pub split_threshold: f64,
    pub min_antecedents: usize,
    pub max_antecedents: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            mention_ratio: 0.4,
            max_clusters: 250,
            split_threshold: 0.5,
            min_antecedents: 2,
            max_antecedents: 5,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mention_ratio > 0.0 && self.mention_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "mention ratio must be in (0, 1], got {}",
                self.mention_ratio
            )));
        }
        if !(self.split_threshold > 0.0 && self.split_threshold < 1.0) {
            return Err(Error::Config(format!(
                "split threshold must be in (0, 1), got {}",
                self.split_threshold
            )));
        }
        if self.min_antecedents > self.max_antecedents {
            return Err(Error::Config(format!(
                "min antecedents {} exceeds max antecedents {}",
                self.min_antecedents, self.max_antecedents
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscourseStatus {
    New,
    Old,
}

/// The option a candidate was attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    NonMention,
    NonReferring,
    DiscourseNew,
    Cluster(ChainId),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub candidate: usize,
    pub choice: Choice,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDecision {
    pub candidate: usize,
    /// Chosen antecedent clusters with their probabilities.
    pub antecedents: Vec<(ChainId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DecodeTrace {
    pub kept: Vec<usize>,
    pub decisions: Vec<Decision>,
    pub splits: Vec<SplitDecision>,
}

/// Decoder output. Mention ids are candidate indices; chain ids number
/// clusters in creation order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub chains: Vec<Chain>,
    pub non_referring: BTreeSet<MentionId>,
    pub discourse_status: BTreeMap<MentionId, DiscourseStatus>,
    pub split_relations: Vec<SplitRelation>,
    pub trace: DecodeTrace,
}

/// Indices of the `⌊ratio × tokens⌋` best candidates by mention score, in
/// document order. Ties go to the earlier, then shorter, span.
pub fn prune(table: &ScoreTable, cfg: &DecoderConfig) -> Vec<usize> {
    // small slack so that e.g. 0.29 × 100 keeps 29
    let budget = (cfg.mention_ratio * table.token_count as f64 + 1e-9).floor() as usize;
    let mut order: Vec<usize> = (0..table.candidates.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&table.candidates[a], &table.candidates[b]);
        cb.s_m
            .total_cmp(&ca.s_m)
            .then(ca.start.cmp(&cb.start))
            .then(ca.span().len().cmp(&cb.span().len()))
            .then(a.cmp(&b))
    });
    order.truncate(budget);
    order.sort_unstable();
    order
}

pub fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

fn mean_mention_score(table: &ScoreTable, members: &[usize]) -> f64 {
    members.iter().map(|&m| table.candidates[m].s_m).sum::<f64>() / members.len() as f64
}

fn best_pair(table: &ScoreTable, i: usize, members: &[usize], pick: impl Fn(&PairScore) -> f64) -> f64 {
    members
        .iter()
        .filter_map(|&m| table.pair(i, m).map(&pick))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Scores of every option for candidate `i` given the clusters built so far,
/// in tie-break order: NO, NR, DN (if still allowed), then clusters by id.
pub fn option_scores(
    table: &ScoreTable,
    clusters: &[Vec<usize>],
    i: usize,
    cfg: &DecoderConfig,
) -> Vec<(Choice, f64)> {
    let c = &table.candidates[i];
    let mut options = vec![
        (Choice::NonMention, c.s_no),
        (Choice::NonReferring, c.s_nr + c.s_m),
    ];
    if clusters.len() < cfg.max_clusters {
        options.push((Choice::DiscourseNew, c.s_dn + c.s_m));
    }
    for (id, members) in clusters.iter().enumerate() {
        let s_c = mean_mention_score(table, members);
        let s_mc = best_pair(table, i, members, |p| p.s_mc);
        options.push((Choice::Cluster(ChainId(id as u32)), c.s_m + s_c + s_mc));
    }
    options
}

fn argmax(options: &[(Choice, f64)]) -> (Choice, f64) {
    let mut best = options[0];
    for &o in &options[1..] {
        if o.1 > best.1 {
            best = o;
        }
    }
    best
}

#[derive(Default)]
struct Builder {
    clusters: Vec<Vec<usize>>,
    non_referring: BTreeSet<MentionId>,
    status: BTreeMap<MentionId, DiscourseStatus>,
}

impl Builder {
    fn apply(&mut self, i: usize, choice: Choice) -> std::result::Result<(), String> {
        let id = MentionId(i as u32);
        match choice {
            Choice::NonMention => {}
            Choice::NonReferring => {
                self.non_referring.insert(id);
            }
            Choice::DiscourseNew => {
                self.clusters.push(vec![i]);
                self.status.insert(id, DiscourseStatus::New);
            }
            Choice::Cluster(c) => {
                let members = self
                    .clusters
                    .get_mut(c.0 as usize)
                    .ok_or_else(|| format!("cluster {c} does not exist"))?;
                members.push(i);
                self.status.insert(id, DiscourseStatus::Old);
            }
        }
        Ok(())
    }

    fn finish(self, trace: DecodeTrace) -> DecodeResult {
        DecodeResult {
            chains: self
                .clusters
                .into_iter()
                .enumerate()
                .map(|(id, members)| Chain {
                    id: ChainId(id as u32),
                    mentions: members.into_iter().map(|m| MentionId(m as u32)).collect(),
                })
                .collect(),
            non_referring: self.non_referring,
            discourse_status: self.status,
            split_relations: Vec::new(),
            trace,
        }
    }
}

/// Left-to-right attachment of the kept candidates.
pub fn rank_clusters(table: &ScoreTable, kept: &[usize], cfg: &DecoderConfig) -> DecodeResult {
    let mut builder = Builder::default();
    let mut trace = DecodeTrace {
        kept: kept.to_vec(),
        ..DecodeTrace::default()
    };
    for &i in kept {
        let (choice, score) = argmax(&option_scores(table, &builder.clusters, i, cfg));
        builder.apply(i, choice).expect("argmax picks an existing cluster");
        trace.decisions.push(Decision {
            candidate: i,
            choice,
            score,
        });
    }
    builder.finish(trace)
}

/// Split-antecedent probabilities of candidate `i` against every cluster
/// that existed when `i` was decoded, using only members that precede `i`.
pub fn split_probabilities(table: &ScoreTable, chains: &[Chain], i: usize) -> Vec<(ChainId, f64)> {
    let s_m = table.candidates[i].s_m;
    chains
        .iter()
        .filter_map(|chain| {
            let members: Vec<usize> = chain
                .mentions
                .iter()
                .map(|m| m.0 as usize)
                .filter(|&m| m < i)
                .collect();
            if members.is_empty() || chain.mentions.contains(&MentionId(i as u32)) {
                return None;
            }
            let s_c = mean_mention_score(table, &members);
            let s_pmc = best_pair(table, i, &members, |p| p.s_pmc);
            Some((chain.id, sigmoid(s_m + s_c + s_pmc)))
        })
        .collect()
}

fn choose_antecedents(mut probs: Vec<(ChainId, f64)>, cfg: &DecoderConfig) -> Option<Vec<(ChainId, f64)>> {
    probs.retain(|&(_, p)| p > cfg.split_threshold);
    if probs.len() < cfg.min_antecedents {
        return None;
    }
    probs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    probs.truncate(cfg.max_antecedents);
    probs.sort_by_key(|&(c, _)| c);
    Some(probs)
}

/// Gives split antecedents to discourse-new mentions whose probabilities
/// clear the threshold for at least `min_antecedents` earlier clusters.
pub fn assign_splits(mut result: DecodeResult, table: &ScoreTable, cfg: &DecoderConfig) -> DecodeResult {
    let new_mentions: Vec<MentionId> = result
        .discourse_status
        .iter()
        .filter(|(_, s)| **s == DiscourseStatus::New)
        .map(|(m, _)| *m)
        .collect();
    for anaphor in new_mentions {
        let i = anaphor.0 as usize;
        let Some(chosen) = choose_antecedents(split_probabilities(table, &result.chains, i), cfg) else {
            continue;
        };
        result.split_relations.push(SplitRelation {
            anaphor,
            antecedent_chains: chosen.iter().map(|&(c, _)| c).collect(),
        });
        result.trace.splits.push(SplitDecision {
            candidate: i,
            antecedents: chosen,
        });
    }
    result
}

/// Prune, rank and assign split antecedents.
pub fn decode(table: &ScoreTable, cfg: &DecoderConfig) -> Result<DecodeResult> {
    cfg.validate()?;
    table.validate()?;
    let kept = prune(table, cfg);
    Ok(assign_splits(rank_clusters(table, &kept, cfg), table, cfg))
}

/// Rebuilds a result from its trace alone, checking every recorded decision
/// against the scores it was made from.
pub fn replay(table: &ScoreTable, trace: &DecodeTrace, cfg: &DecoderConfig) -> Result<DecodeResult> {
    let diverged = |candidate: usize, message: String| Error::Replay { candidate, message };
    if trace.kept != prune(table, cfg) {
        return Err(diverged(0, "kept candidates differ from pruning".into()));
    }
    let mut builder = Builder::default();
    for d in &trace.decisions {
        let options = option_scores(table, &builder.clusters, d.candidate, cfg);
        let recorded = options
            .iter()
            .find(|(c, _)| *c == d.choice)
            .ok_or_else(|| diverged(d.candidate, format!("{:?} was not available", d.choice)))?;
        if recorded.1.to_bits() != d.score.to_bits() {
            return Err(diverged(
                d.candidate,
                format!("score {} recorded, {} recomputed", d.score, recorded.1),
            ));
        }
        if argmax(&options).0 != d.choice {
            return Err(diverged(d.candidate, format!("{:?} is not the best option", d.choice)));
        }
        builder
            .apply(d.candidate, d.choice)
            .map_err(|m| diverged(d.candidate, m))?;
    }
    let mut result = builder.finish(trace.clone());
    for s in &trace.splits {
        let expected = choose_antecedents(split_probabilities(table, &result.chains, s.candidate), cfg);
        if expected.as_ref() != Some(&s.antecedents) {
            return Err(diverged(s.candidate, "split antecedents differ".into()));
        }
        result.split_relations.push(SplitRelation {
            anaphor: MentionId(s.candidate as u32),
            antecedent_chains: s.antecedents.iter().map(|&(c, _)| c).collect(),
        });
    }
    Ok(result)
}

impl DecodeResult {
    /// Converts the result into a system annotation. Without `tokens` the
    /// document gets `token_count` empty tokens.
    pub fn to_document(
        &self,
        table: &ScoreTable,
        tokens: Option<Vec<String>>,
        sentences: Vec<(usize, usize)>,
    ) -> DocumentAnnotation {
        let mut ids: BTreeSet<MentionId> = self.non_referring.clone();
        ids.extend(self.chains.iter().flat_map(|c| c.mentions.iter().copied()));
        DocumentAnnotation {
            doc_id: table.doc_id.clone(),
            tokens: tokens.unwrap_or_else(|| vec![String::new(); table.token_count]),
            sentences,
            mentions: ids
                .into_iter()
                .map(|id| {
                    let c = &table.candidates[id.0 as usize];
                    Mention::individual(id.0, c.start, c.end)
                })
                .collect(),
            chains: self.chains.clone(),
            non_referring: self.non_referring.clone(),
            split_relations: self.split_relations.clone(),
        }
    }
}
