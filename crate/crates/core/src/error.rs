use thiserror::Error;

use crate::model::{ChainId, MentionId, Side};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{side} input, line {line}: {message}")]
    Parse {
        side: Side,
        line: usize,
        message: String,
    },

    #[error("{side} document `{doc_id}`: {kind}")]
    Validation {
        side: Side,
        doc_id: String,
        kind: ValidationError,
    },

    #[error("invalid weight {value} at ({row}, {col}); weights must be finite and non-negative")]
    InvalidWeight { row: usize, col: usize, value: f64 },

    #[error("similarity of an empty chain is undefined")]
    EmptyChain,

    #[error("plural mention with {0} elements exceeds the supported maximum of 16")]
    PluralTooLarge(usize),

    #[error("score table `{doc_id}`: {message}")]
    ScoreTable { doc_id: String, message: String },

    #[error("documents present on only one side: gold-only {gold_only:?}, system-only {system_only:?}")]
    DocumentMismatch {
        gold_only: Vec<String>,
        system_only: Vec<String>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace replay diverged at candidate {candidate}: {message}")]
    Replay { candidate: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Invariant violations in an annotation, each naming the offending id.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("mention {id} has span [{start}, {end}) outside 0..{tokens}")]
    SpanOutOfRange {
        id: MentionId,
        start: usize,
        end: usize,
        tokens: usize,
    },
    #[error("duplicate mention id {0}")]
    DuplicateMention(MentionId),
    #[error("duplicate chain id {0}")]
    DuplicateChain(ChainId),
    #[error("chain {0} is empty")]
    EmptyChain(ChainId),
    #[error("chain {chain} references unknown mention {mention}")]
    UnknownMention { chain: ChainId, mention: MentionId },
    #[error("mention {0} appears in more than one chain")]
    MentionInTwoChains(MentionId),
    #[error("non-referring mention {0} does not exist")]
    UnknownNonReferring(MentionId),
    #[error("non-referring mention {0} belongs to a chain")]
    NonReferringInChain(MentionId),
    #[error("split anaphor {0} does not exist")]
    UnknownAnaphor(MentionId),
    #[error("split anaphor {0} is marked non-referring")]
    NonReferringAnaphor(MentionId),
    #[error("split anaphor {0} appears in more than one split relation")]
    DuplicateAnaphor(MentionId),
    #[error("split anaphor {anaphor} has {count} antecedent chains; at least 2 are required")]
    TooFewAntecedents { anaphor: MentionId, count: usize },
    #[error("split anaphor {anaphor} references unknown chain {chain}")]
    UnknownAntecedentChain { anaphor: MentionId, chain: ChainId },
    #[error("split anaphor {anaphor} lists chain {chain} twice")]
    DuplicateAntecedentChain { anaphor: MentionId, chain: ChainId },
    #[error("split anaphor {anaphor} lists its own chain {chain} as an antecedent")]
    SelfAntecedent { anaphor: MentionId, chain: ChainId },
    #[error("antecedent chain {0} has no individual mentions")]
    AntecedentChainWithoutMentions(ChainId),
    #[error("plural element {0} does not belong to any chain")]
    DanglingPluralElement(MentionId),
    #[error("sentence [{start}, {end}) outside 0..{tokens}")]
    SentenceOutOfRange {
        start: usize,
        end: usize,
        tokens: usize,
    },
    #[error("duplicate doc_id")]
    DuplicateDocument,
}
