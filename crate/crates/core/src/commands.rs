//! Corpus-level drivers behind the command-line subcommands.
//!
//! Each driver takes parsed inputs, fans documents out over a bounded rayon
//! pool and reduces results in `doc_id` order, so the rendered output does not
//! depend on the number of workers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::assignment::{align_chains, ChainAlignment};
use crate::baselines::{self, BaselineConfig};
use crate::decoder::{self, DecoderConfig, ScoreTable};
use crate::error::{Error, Result};
use crate::lea_ext::{self, EntityScore, LeaConfig};
use crate::metrics::{self, MetricScore};
use crate::model::{read_documents, to_json_line, DocumentAnnotation, Side, Span};
use crate::split_eval::{self, AnaphorRow, SplitCounts};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// An input file's bytes and SHA-256 digest.
#[derive(Debug, Clone)]
pub struct Input {
    pub path: String,
    pub bytes: Vec<u8>,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Ok(Input::from_bytes(path.display().to_string(), bytes))
    }

    pub fn from_bytes(path: impl Into<String>, bytes: Vec<u8>) -> Self {
        let sha256 = hex::encode(Sha256::digest(&bytes));
        Input {
            path: path.into(),
            bytes,
            sha256,
        }
    }

    pub fn documents(&self, side: Side) -> Result<Vec<DocumentAnnotation>> {
        read_documents(self.bytes.as_slice(), side)
    }
}

/// Runs `f` on a pool of `jobs` workers; 0 uses rayon's default size.
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Pairs gold and system documents by id, sorted by id. Every id must occur
/// on both sides.
pub fn pair_documents<'a>(
    gold: &'a [DocumentAnnotation],
    sys: &'a [DocumentAnnotation],
) -> Result<Vec<(&'a DocumentAnnotation, &'a DocumentAnnotation)>> {
    let g: BTreeMap<&str, &DocumentAnnotation> = gold.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let s: BTreeMap<&str, &DocumentAnnotation> = sys.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let gold_only: Vec<String> = g.keys().filter(|k| !s.contains_key(*k)).map(|k| k.to_string()).collect();
    let system_only: Vec<String> = s.keys().filter(|k| !g.contains_key(*k)).map(|k| k.to_string()).collect();
    if !gold_only.is_empty() || !system_only.is_empty() {
        return Err(Error::DocumentMismatch { gold_only, system_only });
    }
    Ok(g.into_iter().map(|(id, gd)| (gd, s[id])).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Muc,
    Bcubed,
    Ceafe,
    Conll,
    Lea,
    LeaStandard,
    Nonref,
}

impl Metric {
    pub const DEFAULT: [Metric; 6] = [
        Metric::Muc,
        Metric::Bcubed,
        Metric::Ceafe,
        Metric::Conll,
        Metric::Lea,
        Metric::Nonref,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Muc => "muc",
            Metric::Bcubed => "bcubed",
            Metric::Ceafe => "ceafe",
            Metric::Conll => "conll",
            Metric::Lea => "lea",
            Metric::LeaStandard => "lea_standard",
            Metric::Nonref => "nonref",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LeaReport {
    PerEntity,
    #[default]
    Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreOptions {
    pub metrics: BTreeSet<Metric>,
    pub lea: LeaConfig,
    pub lea_report: LeaReport,
    pub only_split_docs: bool,
    pub macro_average: bool,
    pub per_document: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            metrics: Metric::DEFAULT.into_iter().collect(),
            lea: LeaConfig::default(),
            lea_report: LeaReport::Summary,
            only_split_docs: false,
            macro_average: false,
            per_document: false,
        }
    }
}

/// A metric value: a full score, or a bare F1 for the CoNLL average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MetricValue {
    Score(MetricScore),
    Scalar(f64),
}

impl MetricValue {
    pub fn f1(&self) -> f64 {
        match self {
            MetricValue::Score(s) => s.f1,
            MetricValue::Scalar(v) => *v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacroScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityRows {
    pub gold: Vec<EntityScore>,
    pub system: Vec<EntityScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: C,
    pub inputs: Vec<InputDigest>,
}

impl<C: Serialize> Metadata<C> {
    pub fn new(config: C, inputs: &[&Input]) -> Self {
        Metadata {
            tool: TOOL,
            version: VERSION,
            config,
            inputs: inputs
                .iter()
                .map(|i| InputDigest {
                    path: i.path.clone(),
                    sha256: i.sha256.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub documents: usize,
    pub corpus: BTreeMap<&'static str, MetricValue>,
    #[serde(rename = "macro", skip_serializing_if = "Option::is_none")]
    pub macro_average: Option<BTreeMap<&'static str, MacroScore>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_document: Option<BTreeMap<String, BTreeMap<&'static str, MetricValue>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lea_entities: Option<BTreeMap<String, EntityRows>>,
    pub metadata: Metadata<ScoreOptions>,
}

struct DocScores {
    doc_id: String,
    scores: BTreeMap<Metric, MetricScore>,
    entities: Option<EntityRows>,
}

fn needs(opts: &ScoreOptions, m: Metric) -> bool {
    opts.metrics.contains(&m) || (opts.metrics.contains(&Metric::Conll) && matches!(m, Metric::Muc | Metric::Bcubed | Metric::Ceafe))
}

fn score_pair(gold: &DocumentAnnotation, sys: &DocumentAnnotation, opts: &ScoreOptions) -> Result<DocScores> {
    let key = |d: &DocumentAnnotation| -> Vec<BTreeSet<Span>> { d.span_chains().into_iter().map(|(_, c)| c).collect() };
    let (g, s) = (key(gold), key(sys));
    let mut scores = BTreeMap::new();
    if needs(opts, Metric::Muc) {
        scores.insert(Metric::Muc, metrics::muc(&g, &s));
    }
    if needs(opts, Metric::Bcubed) {
        scores.insert(Metric::Bcubed, metrics::b_cubed(&g, &s));
    }
    if needs(opts, Metric::Ceafe) {
        scores.insert(Metric::Ceafe, metrics::ceaf_phi4(&g, &s)?);
    }
    if needs(opts, Metric::LeaStandard) {
        scores.insert(Metric::LeaStandard, metrics::lea_standard(&g, &s));
    }
    if needs(opts, Metric::Nonref) {
        scores.insert(
            Metric::Nonref,
            metrics::non_referring_f1(&gold.non_referring_spans(), &sys.non_referring_spans()),
        );
    }
    let mut entities = None;
    if needs(opts, Metric::Lea) {
        let pair = lea_ext::normalize(sys, gold)?;
        let (score, gold_rows, sys_rows) = lea_ext::lea_extended_detailed(&pair.gold, &pair.system, &opts.lea);
        scores.insert(Metric::Lea, score);
        if opts.lea_report == LeaReport::PerEntity {
            entities = Some(EntityRows {
                gold: gold_rows,
                system: sys_rows,
            });
        }
    }
    Ok(DocScores {
        doc_id: gold.doc_id.clone(),
        scores,
        entities,
    })
}

fn render(opts: &ScoreOptions, scores: &BTreeMap<Metric, MetricScore>) -> BTreeMap<&'static str, MetricValue> {
    opts.metrics
        .iter()
        .map(|&m| {
            let value = match m {
                Metric::Conll => MetricValue::Scalar(metrics::conll_average(
                    &scores[&Metric::Muc],
                    &scores[&Metric::Bcubed],
                    &scores[&Metric::Ceafe],
                )),
                _ => MetricValue::Score(scores[&m]),
            };
            (m.name(), value)
        })
        .collect()
}

fn macro_average(opts: &ScoreOptions, docs: &[DocScores]) -> BTreeMap<&'static str, MacroScore> {
    let n = docs.len().max(1) as f64;
    let mut out = BTreeMap::new();
    for d in docs {
        for (name, value) in render(opts, &d.scores) {
            let (r, p, f) = match value {
                MetricValue::Score(s) => (s.recall, s.precision, s.f1),
                MetricValue::Scalar(v) => (v, v, v),
            };
            let e = out.entry(name).or_insert(MacroScore {
                recall: 0.0,
                precision: 0.0,
                f1: 0.0,
            });
            e.recall += r / n;
            e.precision += p / n;
            e.f1 += f / n;
        }
    }
    out
}

/// Scores a corpus. Documents are paired by id; with `only_split_docs` only
/// documents whose gold side has split relations are kept.
pub fn score_corpus(
    gold: &[DocumentAnnotation],
    sys: &[DocumentAnnotation],
    opts: &ScoreOptions,
    metadata: Metadata<ScoreOptions>,
) -> Result<EvalReport> {
    if opts.metrics.is_empty() {
        return Err(Error::Config("no metrics selected".into()));
    }
    let pairs: Vec<_> = pair_documents(gold, sys)?
        .into_iter()
        .filter(|(g, _)| !opts.only_split_docs || g.has_split_relations())
        .collect();
    let docs = pairs
        .par_iter()
        .map(|(g, s)| score_pair(g, s, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut totals: BTreeMap<Metric, MetricScore> = BTreeMap::new();
    for d in &docs {
        for (&m, &s) in &d.scores {
            *totals.entry(m).or_default() = totals.get(&m).copied().unwrap_or_default() + s;
        }
    }
    for &m in &opts.metrics {
        if m != Metric::Conll {
            totals.entry(m).or_default();
        }
    }
    if opts.metrics.contains(&Metric::Conll) {
        for m in [Metric::Muc, Metric::Bcubed, Metric::Ceafe] {
            totals.entry(m).or_default();
        }
    }

    Ok(EvalReport {
        documents: docs.len(),
        corpus: render(opts, &totals),
        macro_average: opts.macro_average.then(|| macro_average(opts, &docs)),
        per_document: opts
            .per_document
            .then(|| docs.iter().map(|d| (d.doc_id.clone(), render(opts, &d.scores))).collect()),
        lea_entities: (opts.lea_report == LeaReport::PerEntity && opts.metrics.contains(&Metric::Lea)).then(|| {
            docs.iter()
                .filter_map(|d| d.entities.clone().map(|e| (d.doc_id.clone(), e)))
                .collect()
        }),
        metadata,
    })
}

pub fn run_score(gold: &Input, sys: &Input, opts: &ScoreOptions, jobs: usize) -> Result<EvalReport> {
    let g = gold.documents(Side::Gold)?;
    let s = sys.documents(Side::System)?;
    let metadata = Metadata::new(opts.clone(), &[gold, sys]);
    with_pool(jobs, || score_corpus(&g, &s, opts, metadata))?
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rpf {
    pub r: f64,
    pub p: f64,
    pub f1: f64,
}

impl From<MetricScore> for Rpf {
    fn from(s: MetricScore) -> Self {
        Rpf {
            r: s.recall,
            p: s.precision,
            f1: s.f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSummary {
    pub documents: usize,
    pub recognition: Rpf,
    pub lenient: Rpf,
    pub strict: Rpf,
    pub lenient_macro: Rpf,
    pub counts: SplitCounts,
    pub metadata: Metadata<()>,
}

/// Split-antecedent scores summed over the corpus, plus per-anaphor rows
/// keyed by document.
pub fn split_corpus(
    gold: &[DocumentAnnotation],
    sys: &[DocumentAnnotation],
    metadata: Metadata<()>,
) -> Result<(SplitSummary, Vec<(String, AnaphorRow)>)> {
    let pairs = pair_documents(gold, sys)?;
    let matches = pairs
        .par_iter()
        .map(|(g, s)| split_eval::antecedent_match(g, s).map(|m| (g.doc_id.clone(), m)))
        .collect::<Result<Vec<_>>>()?;
    let counts = matches
        .iter()
        .fold(SplitCounts::default(), |acc, (_, m)| acc + m.counts);
    let rows = matches
        .into_iter()
        .flat_map(|(id, m)| m.rows.into_iter().map(move |r| (id.clone(), r)))
        .collect();
    let report = split_eval::SplitEvalReport::from_counts(&counts, Vec::new());
    Ok((
        SplitSummary {
            documents: pairs.len(),
            recognition: report.recognition.into(),
            lenient: report.lenient.into(),
            strict: report.strict.into(),
            lenient_macro: report.lenient_macro.into(),
            counts,
            metadata,
        },
        rows,
    ))
}

pub fn per_anaphor_tsv(rows: &[(String, AnaphorRow)]) -> String {
    let mut out = String::from("doc_id\tstart\tend\tmatched\tgold\tpredicted\tcorrect\tstrict\n");
    for (doc, r) in rows {
        let _ = writeln!(
            out,
            "{doc}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.span.start,
            r.span.end,
            r.matched,
            r.gold_antecedents,
            r.predicted_antecedents,
            r.correct_antecedents,
            r.strict_correct()
        );
    }
    out
}

pub fn run_split(gold: &Input, sys: &Input, jobs: usize) -> Result<(SplitSummary, Vec<(String, AnaphorRow)>)> {
    let g = gold.documents(Side::Gold)?;
    let s = sys.documents(Side::System)?;
    let metadata = Metadata::new((), &[gold, sys]);
    with_pool(jobs, || split_corpus(&g, &s, metadata))?
}

/// Applies a baseline to every document and renders JSON lines in input
/// order.
pub fn run_baseline(sys: &Input, cfg: &BaselineConfig, jobs: usize) -> Result<String> {
    let docs = sys.documents(Side::System)?;
    let out = with_pool(jobs, || {
        docs.par_iter()
            .map(|d| baselines::apply(d, cfg).and_then(|d| to_json_line(&d)))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(join_lines(out))
}

fn join_lines(lines: Vec<String>) -> String {
    let mut s = lines.join("\n");
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

pub fn read_score_tables(input: &Input) -> Result<Vec<ScoreTable>> {
    let text = std::str::from_utf8(&input.bytes).map_err(|e| Error::Config(format!("{}: {e}", input.path)))?;
    let mut seen = BTreeSet::new();
    let mut tables = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let t = ScoreTable::from_json(line)?;
        if !seen.insert(t.doc_id.clone()) {
            return Err(Error::ScoreTable {
                doc_id: t.doc_id,
                message: "listed twice".into(),
            });
        }
        tables.push(t);
    }
    Ok(tables)
}

/// Decodes one table into a JSON line; `source` supplies tokens and sentence
/// boundaries when given.
pub fn decode_line(
    table: &ScoreTable,
    source: Option<&DocumentAnnotation>,
    cfg: &DecoderConfig,
    trace: bool,
) -> Result<String> {
    let result = decoder::decode(table, cfg)?;
    let doc = match source {
        Some(d) => {
            if d.tokens.len() != table.token_count {
                return Err(Error::ScoreTable {
                    doc_id: table.doc_id.clone(),
                    message: format!("{} tokens in scores, {} in document", table.token_count, d.tokens.len()),
                });
            }
            result.to_document(table, Some(d.tokens.clone()), d.sentences.clone())
        }
        None => result.to_document(table, None, Vec::new()),
    };
    doc.validate(Side::System)?;
    if !trace {
        return to_json_line(&doc);
    }
    let mut value: serde_json::Value = serde_json::from_str(&to_json_line(&doc)?)?;
    value["trace"] = serde_json::to_value(&result.trace)?;
    Ok(serde_json::to_string(&value)?)
}

pub fn run_decode(
    scores: &Input,
    docs: Option<&Input>,
    cfg: &DecoderConfig,
    trace: bool,
    jobs: usize,
) -> Result<String> {
    cfg.validate()?;
    let tables = read_score_tables(scores)?;
    let sources: BTreeMap<String, DocumentAnnotation> = match docs {
        Some(input) => input
            .documents(Side::System)?
            .into_iter()
            .map(|d| (d.doc_id.clone(), d))
            .collect(),
        None => BTreeMap::new(),
    };
    let lines = with_pool(jobs, || {
        tables
            .par_iter()
            .map(|t| decode_line(t, sources.get(&t.doc_id), cfg, trace))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(join_lines(lines))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocumentAlignment {
    pub doc_id: String,
    #[serde(flatten)]
    pub alignment: ChainAlignment,
}

pub fn run_align(gold: &Input, sys: &Input, jobs: usize) -> Result<String> {
    let g = gold.documents(Side::Gold)?;
    let s = sys.documents(Side::System)?;
    let pairs = pair_documents(&g, &s)?;
    let lines = with_pool(jobs, || {
        pairs
            .par_iter()
            .map(|(g, s)| {
                let alignment = align_chains(g, s)?;
                Ok(serde_json::to_string(&DocumentAlignment {
                    doc_id: g.doc_id.clone(),
                    alignment,
                })?)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(join_lines(lines))
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLD: &str = concat!(
        r#"{"doc_id":"a","tokens":["Mary","and","John","met",".","They","left"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":5,"end":6}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]}],"split_relations":[{"anaphor":2,"antecedent_chains":[0,1]}]}"#,
        "\n",
        r#"{"doc_id":"b","tokens":["It","rains",".","Sue","said","she","came"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":3,"end":4},{"id":2,"start":5,"end":6}],"chains":[{"id":0,"mentions":[1,2]}],"non_referring":[0]}"#,
        "\n"
    );

    fn input(text: &str) -> Input {
        Input::from_bytes("mem", text.as_bytes().to_vec())
    }

    #[test]
    fn self_score_is_perfect() {
        let gold = input(GOLD);
        let opts = ScoreOptions {
            metrics: [Metric::DEFAULT.as_slice(), &[Metric::LeaStandard]].concat().into_iter().collect(),
            per_document: true,
            macro_average: true,
            ..ScoreOptions::default()
        };
        let report = run_score(&gold, &gold, &opts, 2).unwrap();
        assert_eq!(report.documents, 2);
        for (name, v) in &report.corpus {
            assert_eq!(v.f1(), 1.0, "{name}");
        }
        assert_eq!(report.per_document.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn corpus_sums_documents() {
        let gold = input(GOLD);
        let sys_text = GOLD.replace(r#"{"id":0,"mentions":[1,2]}"#, r#"{"id":0,"mentions":[1]},{"id":5,"mentions":[2]}"#);
        let sys = input(&sys_text);
        let opts = ScoreOptions {
            per_document: true,
            ..ScoreOptions::default()
        };
        let report = run_score(&gold, &sys, &opts, 1).unwrap();
        let per_doc = report.per_document.as_ref().unwrap();
        for (name, value) in &report.corpus {
            let MetricValue::Score(total) = value else { continue };
            let summed: f64 = per_doc
                .values()
                .map(|m| match m[name] {
                    MetricValue::Score(s) => s.recall_num,
                    MetricValue::Scalar(_) => unreachable!(),
                })
                .sum();
            assert!((summed - total.recall_num).abs() < 1e-12, "{name}");
        }
        assert!(report.corpus["muc"].f1() < 1.0);
    }

    #[test]
    fn only_split_docs_filters() {
        let gold = input(GOLD);
        let opts = ScoreOptions {
            only_split_docs: true,
            ..ScoreOptions::default()
        };
        assert_eq!(run_score(&gold, &gold, &opts, 1).unwrap().documents, 1);
    }

    #[test]
    fn mismatched_documents() {
        let gold = input(GOLD);
        let sys = input(GOLD.lines().next().unwrap());
        let err = run_score(&gold, &sys, &ScoreOptions::default(), 1).unwrap_err();
        match err {
            Error::DocumentMismatch { gold_only, system_only } => {
                assert_eq!(gold_only, vec!["b".to_string()]);
                assert!(system_only.is_empty());
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn split_on_identical_input() {
        let gold = input(GOLD);
        let (summary, rows) = run_split(&gold, &gold, 1).unwrap();
        assert_eq!(summary.recognition.f1, 1.0);
        assert_eq!(summary.lenient.f1, 1.0);
        assert_eq!(summary.strict.f1, 1.0);
        assert_eq!(rows.len(), 1);
        assert!(per_anaphor_tsv(&rows).lines().nth(1).unwrap().ends_with("true"));
    }

    #[test]
    fn parallel_output_matches_serial() {
        let gold = input(GOLD);
        let opts = ScoreOptions {
            per_document: true,
            lea_report: LeaReport::PerEntity,
            ..ScoreOptions::default()
        };
        let one = to_pretty_json(&run_score(&gold, &gold, &opts, 1).unwrap()).unwrap();
        let many = to_pretty_json(&run_score(&gold, &gold, &opts, 8).unwrap()).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn align_lists_pairs() {
        let gold = input(GOLD);
        let out = run_align(&gold, &gold, 1).unwrap();
        let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
        assert_eq!(first["doc_id"], "a");
        assert_eq!(first["pairs"].as_array().unwrap().len(), 3);
        assert_eq!(first["total_similarity"], 3.0);
    }
}
