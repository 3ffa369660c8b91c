//! Coreference evaluation with split-antecedent plural anaphors.
//!
//! The crate scores system output against gold annotation with the standard
//! link- and entity-based metrics ([`metrics`]), with a plural-aware LEA that
//! gives partial credit for incompletely resolved plural mentions
//! ([`lea_ext`]), and with dedicated split-antecedent scores
//! ([`split_eval`]). It also produces system output: heuristic baselines
//! ([`baselines`]) and a cluster-ranking decoder over externally computed
//! score tables ([`decoder`]).
//!
//! Documents travel as JSON lines; see [`model::read_documents`].

pub mod assignment;
pub mod baselines;
pub mod commands;
pub mod decoder;
pub mod error;
pub mod lea_ext;
pub mod metrics;
pub mod model;
pub mod split_eval;

pub use assignment::{align_chains, max_weight_matching, phi4, AlignmentResult, ChainAlignment};
pub use baselines::{BaselineConfig, BaselineModel};
pub use decoder::{decode, replay, DecodeResult, DecoderConfig, ScoreTable};
pub use error::{Error, Result, ValidationError};
pub use lea_ext::{lea_extended, link_reward, normalize, LeaConfig, NormalizedMention};
pub use metrics::{b_cubed, ceaf_phi4, conll_average, lea_standard, muc, non_referring_f1, MetricScore};
pub use model::{
    read_documents, write_documents, Chain, ChainId, DocumentAnnotation, Mention, MentionId, MentionKind, Side, Span,
    SplitRelation,
};
pub use split_eval::SplitEvalReport;
