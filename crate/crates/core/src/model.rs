//! Annotation data model and its JSON-lines wire format.
//!
//! A document carries individual mentions (token spans), coreference chains
//! over those mentions, a non-referring list and split-antecedent relations.
//! Plural mentions never appear on the wire; [`DocumentAnnotation::materialize_plurals`]
//! derives them from the split relations.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MentionId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainId(pub u32);

impl fmt::Display for MentionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ChainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Half-open token range `[start, end)`. Ordered by start, then end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Gold,
    System,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Gold => "gold",
            Side::System => "system",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MentionKind {
    Individual(Span),
    /// A set of entities, written as the representative mentions of the
    /// antecedent chains. `anaphor` is the mention the plural was derived from.
    Plural {
        elements: BTreeSet<MentionId>,
        anaphor: MentionId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub id: MentionId,
    pub kind: MentionKind,
}

impl Mention {
    pub fn individual(id: u32, start: usize, end: usize) -> Self {
        Mention {
            id: MentionId(id),
            kind: MentionKind::Individual(Span::new(start, end)),
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self.kind {
            MentionKind::Individual(span) => Some(span),
            MentionKind::Plural { .. } => None,
        }
    }

    pub fn is_plural(&self) -> bool {
        matches!(self.kind, MentionKind::Plural { .. })
    }

    /// 1 for an individual mention, the number of elements for a plural one.
    pub fn size(&self) -> usize {
        match &self.kind {
            MentionKind::Individual(_) => 1,
            MentionKind::Plural { elements, .. } => elements.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub id: ChainId,
    pub mentions: Vec<MentionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRelation {
    pub anaphor: MentionId,
    pub antecedent_chains: Vec<ChainId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentAnnotation {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub sentences: Vec<(usize, usize)>,
    pub mentions: Vec<Mention>,
    pub chains: Vec<Chain>,
    pub non_referring: BTreeSet<MentionId>,
    pub split_relations: Vec<SplitRelation>,
}

impl DocumentAnnotation {
    pub fn mention(&self, id: MentionId) -> Option<&Mention> {
        self.mentions.iter().find(|m| m.id == id)
    }

    pub fn mention_index(&self) -> BTreeMap<MentionId, &Mention> {
        self.mentions.iter().map(|m| (m.id, m)).collect()
    }

    pub fn span_of(&self, id: MentionId) -> Option<Span> {
        self.mention(id).and_then(Mention::span)
    }

    pub fn chain(&self, id: ChainId) -> Option<&Chain> {
        self.chains.iter().find(|c| c.id == id)
    }

    /// Maps every chained mention to its chain.
    pub fn chain_of_mention(&self) -> BTreeMap<MentionId, ChainId> {
        self.chains
            .iter()
            .flat_map(|c| c.mentions.iter().map(move |&m| (m, c.id)))
            .collect()
    }

    /// The earliest individual mention of a chain (by start, then end, then id).
    pub fn representative(&self, chain: ChainId) -> Option<MentionId> {
        let index = self.mention_index();
        self.chain(chain)?
            .mentions
            .iter()
            .filter_map(|id| index.get(id).and_then(|m| m.span()).map(|s| (s, *id)))
            .min()
            .map(|(_, id)| id)
    }

    /// Chains as sets of individual-mention spans. Plural mentions are left
    /// out and chains that end up empty are dropped.
    pub fn span_chains(&self) -> Vec<(ChainId, BTreeSet<Span>)> {
        let index = self.mention_index();
        self.chains
            .iter()
            .filter_map(|c| {
                let spans: BTreeSet<Span> = c
                    .mentions
                    .iter()
                    .filter_map(|id| index.get(id).and_then(|m| m.span()))
                    .collect();
                (!spans.is_empty()).then_some((c.id, spans))
            })
            .collect()
    }

    /// Mentions that open their chain, i.e. the earliest individual mention
    /// of every chain.
    pub fn discourse_new(&self) -> BTreeSet<MentionId> {
        self.chains
            .iter()
            .filter_map(|c| self.representative(c.id))
            .collect()
    }

    pub fn non_referring_spans(&self) -> BTreeSet<Span> {
        self.non_referring
            .iter()
            .filter_map(|&id| self.span_of(id))
            .collect()
    }

    pub fn has_split_relations(&self) -> bool {
        !self.split_relations.is_empty()
    }

    /// Lowercased surface form of a mention, tokens joined by single spaces.
    pub fn surface(&self, id: MentionId) -> Option<String> {
        let span = self.span_of(id)?;
        let words: Vec<String> = self
            .tokens
            .get(span.start..span.end)?
            .iter()
            .map(|t| t.to_lowercase())
            .collect();
        Some(words.join(" "))
    }

    pub fn validate(&self, side: Side) -> Result<()> {
        self.check().map_err(|kind| Error::Validation {
            side,
            doc_id: self.doc_id.clone(),
            kind,
        })
    }

    fn check(&self) -> Result<(), ValidationError> {
        let tokens = self.tokens.len();
        for &(start, end) in &self.sentences {
            if start > end || end > tokens {
                return Err(ValidationError::SentenceOutOfRange { start, end, tokens });
            }
        }

        let mut ids = HashSet::new();
        for m in &self.mentions {
            if !ids.insert(m.id) {
                return Err(ValidationError::DuplicateMention(m.id));
            }
            if let MentionKind::Individual(span) = m.kind {
                if span.start >= span.end || span.end > tokens {
                    return Err(ValidationError::SpanOutOfRange {
                        id: m.id,
                        start: span.start,
                        end: span.end,
                        tokens,
                    });
                }
            }
        }

        let mut chain_ids = HashSet::new();
        let mut chained = HashSet::new();
        for c in &self.chains {
            if !chain_ids.insert(c.id) {
                return Err(ValidationError::DuplicateChain(c.id));
            }
            if c.mentions.is_empty() {
                return Err(ValidationError::EmptyChain(c.id));
            }
            for &m in &c.mentions {
                if !ids.contains(&m) {
                    return Err(ValidationError::UnknownMention {
                        chain: c.id,
                        mention: m,
                    });
                }
                if !chained.insert(m) {
                    return Err(ValidationError::MentionInTwoChains(m));
                }
            }
        }

        for &m in &self.non_referring {
            if !ids.contains(&m) {
                return Err(ValidationError::UnknownNonReferring(m));
            }
            if chained.contains(&m) {
                return Err(ValidationError::NonReferringInChain(m));
            }
        }

        for m in &self.mentions {
            if let MentionKind::Plural { elements, .. } = &m.kind {
                if let Some(e) = elements.iter().find(|e| !chained.contains(*e)) {
                    return Err(ValidationError::DanglingPluralElement(*e));
                }
            }
        }

        let chain_of = self.chain_of_mention();
        let mut anaphors = HashSet::new();
        for rel in &self.split_relations {
            let anaphor = rel.anaphor;
            if !ids.contains(&anaphor) {
                return Err(ValidationError::UnknownAnaphor(anaphor));
            }
            if self.non_referring.contains(&anaphor) {
                return Err(ValidationError::NonReferringAnaphor(anaphor));
            }
            if !anaphors.insert(anaphor) {
                return Err(ValidationError::DuplicateAnaphor(anaphor));
            }
            if rel.antecedent_chains.len() < 2 {
                return Err(ValidationError::TooFewAntecedents {
                    anaphor,
                    count: rel.antecedent_chains.len(),
                });
            }
            let mut seen = HashSet::new();
            for &chain in &rel.antecedent_chains {
                if !chain_ids.contains(&chain) {
                    return Err(ValidationError::UnknownAntecedentChain { anaphor, chain });
                }
                if !seen.insert(chain) {
                    return Err(ValidationError::DuplicateAntecedentChain { anaphor, chain });
                }
                if chain_of.get(&anaphor) == Some(&chain) {
                    return Err(ValidationError::SelfAntecedent { anaphor, chain });
                }
            }
        }
        Ok(())
    }

    /// Adds one plural mention per split relation to the anaphor's chain,
    /// right after the anaphor. Its elements are the representatives of the
    /// antecedent chains. An anaphor without a chain gets a new one.
    /// Relations whose plural mention is already present are skipped.
    pub fn materialize_plurals(&self) -> Result<DocumentAnnotation> {
        let mut doc = self.clone();
        let mut next_mention = doc.mentions.iter().map(|m| m.id.0 + 1).max().unwrap_or(0);
        let mut next_chain = doc.chains.iter().map(|c| c.id.0 + 1).max().unwrap_or(0);
        let done: BTreeSet<MentionId> = doc
            .mentions
            .iter()
            .filter_map(|m| match &m.kind {
                MentionKind::Plural { anaphor, .. } => Some(*anaphor),
                _ => None,
            })
            .collect();

        for rel in &self.split_relations {
            if done.contains(&rel.anaphor) {
                continue;
            }
            let mut elements = BTreeSet::new();
            for &chain in &rel.antecedent_chains {
                let rep = self.representative(chain).ok_or_else(|| Error::Validation {
                    side: Side::Gold,
                    doc_id: self.doc_id.clone(),
                    kind: ValidationError::AntecedentChainWithoutMentions(chain),
                })?;
                elements.insert(rep);
            }
            let plural = MentionId(next_mention);
            next_mention += 1;
            doc.mentions.push(Mention {
                id: plural,
                kind: MentionKind::Plural {
                    elements,
                    anaphor: rel.anaphor,
                },
            });

            match doc
                .chains
                .iter_mut()
                .find(|c| c.mentions.contains(&rel.anaphor))
            {
                Some(chain) => {
                    let pos = chain
                        .mentions
                        .iter()
                        .position(|&m| m == rel.anaphor)
                        .expect("anaphor is in its chain");
                    chain.mentions.insert(pos + 1, plural);
                }
                None => {
                    doc.chains.push(Chain {
                        id: ChainId(next_chain),
                        mentions: vec![rel.anaphor, plural],
                    });
                    next_chain += 1;
                }
            }
        }
        Ok(doc)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MentionRecord {
    id: MentionId,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ChainRecord {
    id: ChainId,
    mentions: Vec<MentionId>,
}

/// One line of a JSON-lines annotation file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocumentRecord {
    doc_id: String,
    tokens: Vec<String>,
    #[serde(default)]
    sentences: Vec<[usize; 2]>,
    #[serde(default)]
    mentions: Vec<MentionRecord>,
    #[serde(default)]
    chains: Vec<ChainRecord>,
    #[serde(default)]
    non_referring: Vec<MentionId>,
    #[serde(default)]
    split_relations: Vec<SplitRelation>,
}

impl From<DocumentRecord> for DocumentAnnotation {
    fn from(r: DocumentRecord) -> Self {
        DocumentAnnotation {
            doc_id: r.doc_id,
            tokens: r.tokens,
            sentences: r.sentences.into_iter().map(|[s, e]| (s, e)).collect(),
            mentions: r
                .mentions
                .into_iter()
                .map(|m| Mention {
                    id: m.id,
                    kind: MentionKind::Individual(Span::new(m.start, m.end)),
                })
                .collect(),
            chains: r
                .chains
                .into_iter()
                .map(|c| Chain {
                    id: c.id,
                    mentions: c.mentions,
                })
                .collect(),
            non_referring: r.non_referring.into_iter().collect(),
            split_relations: r.split_relations,
        }
    }
}

impl From<&DocumentAnnotation> for DocumentRecord {
    /// Plural mentions are derived data and are dropped, together with any
    /// chain left empty by their removal.
    fn from(doc: &DocumentAnnotation) -> Self {
        let plural: HashSet<MentionId> = doc
            .mentions
            .iter()
            .filter(|m| m.is_plural())
            .map(|m| m.id)
            .collect();
        DocumentRecord {
            doc_id: doc.doc_id.clone(),
            tokens: doc.tokens.clone(),
            sentences: doc.sentences.iter().map(|&(s, e)| [s, e]).collect(),
            mentions: doc
                .mentions
                .iter()
                .filter_map(|m| {
                    m.span().map(|s| MentionRecord {
                        id: m.id,
                        start: s.start,
                        end: s.end,
                    })
                })
                .collect(),
            chains: doc
                .chains
                .iter()
                .filter_map(|c| {
                    let mentions: Vec<MentionId> = c
                        .mentions
                        .iter()
                        .copied()
                        .filter(|m| !plural.contains(m))
                        .collect();
                    (!mentions.is_empty()).then_some(ChainRecord { id: c.id, mentions })
                })
                .collect(),
            non_referring: doc.non_referring.iter().copied().collect(),
            split_relations: doc.split_relations.clone(),
        }
    }
}

/// Parses and validates a single JSON record. `line` is only used for error
/// reporting.
pub fn parse_document(raw: &str, side: Side, line: usize) -> Result<DocumentAnnotation> {
    let record: DocumentRecord = serde_json::from_str(raw).map_err(|e| Error::Parse {
        side,
        line,
        message: e.to_string(),
    })?;
    let doc = DocumentAnnotation::from(record);
    doc.validate(side)?;
    Ok(doc)
}

/// Reads a JSON-lines stream, one document per non-blank line.
pub fn read_documents<R: BufRead>(reader: R, side: Side) -> Result<Vec<DocumentAnnotation>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_document(&line, side, i + 1)?;
        if !seen.insert(doc.doc_id.clone()) {
            return Err(Error::Validation {
                side,
                doc_id: doc.doc_id,
                kind: ValidationError::DuplicateDocument,
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn to_json_line(doc: &DocumentAnnotation) -> Result<String> {
    Ok(serde_json::to_string(&DocumentRecord::from(doc))?)
}

pub fn write_documents<W: Write>(mut writer: W, docs: &[DocumentAnnotation]) -> Result<()> {
    for doc in docs {
        writeln!(writer, "{}", to_json_line(doc)?)?;
    }
    Ok(())
}
