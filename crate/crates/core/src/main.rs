use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use corefsplit::commands::{self, Input, LeaReport, Metric, ScoreOptions};
use corefsplit::{BaselineConfig, BaselineModel, DecoderConfig, Error, LeaConfig};

#[derive(Parser)]
#[command(version, about = "Coreference scoring and decoding with split-antecedent anaphors")]
struct Cli {
    /// Seed for randomized baselines.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Recent,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Coreference metrics over a gold and a system corpus.
    Score {
        /// Gold JSON-lines corpus
        #[arg(long)]
        gold: PathBuf,
        /// System JSON-lines corpus
        #[arg(long)]
        sys: PathBuf,
        /// Comma-separated metric names
        #[arg(long, value_delimiter = ',', default_values = ["muc", "bcubed", "ceafe", "conll", "lea", "nonref"])]
        metrics: Vec<Metric>,
        /// Importance factor of entities with a plural mention.
        #[arg(long, default_value_t = 1.0)]
        imp_split: f64,
        /// Plural-aware LEA detail level
        #[arg(long, value_enum, default_value = "summary")]
        lea_report: LeaReport,
        /// Size anaphor atoms by their referent count.
        #[arg(long)]
        strict_formula: bool,
        /// Score only documents whose gold side has split antecedents.
        #[arg(long)]
        only_split_docs: bool,
        /// Add per-document averages next to the corpus scores.
        #[arg(long = "macro")]
        macro_average: bool,
        /// Include the scores of every document
        #[arg(long)]
        per_document: bool,
    },
    /// Split-antecedent recognition, lenient and strict scores.
    Split {
        /// Gold JSON-lines corpus
        #[arg(long)]
        gold: PathBuf,
        /// System JSON-lines corpus
        #[arg(long)]
        sys: PathBuf,
        /// Write one TSV row per gold anaphor.
        #[arg(long)]
        per_anaphor: Option<PathBuf>,
    },
    /// Add baseline split antecedents to a system corpus.
    Baseline {
        /// System JSON-lines corpus
        #[arg(long)]
        sys: PathBuf,
        /// Antecedent selection strategy
        #[arg(long, value_enum)]
        model: Model,
        /// Antecedents taken by the recent-x model.
        #[arg(long, default_value_t = 2)]
        x: usize,
        /// Comma-separated anaphor surface forms.
        #[arg(long, value_delimiter = ',')]
        pronouns: Option<Vec<String>>,
    },
    /// Decode score tables into a system corpus.
    Decode {
        /// JSON-lines score tables, one per document
        #[arg(long)]
        scores: PathBuf,
        /// Documents supplying tokens and sentences.
        #[arg(long)]
        docs: Option<PathBuf>,
        /// Minimum probability for a split antecedent
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Candidates kept per token before decoding
        #[arg(long, default_value_t = 0.4)]
        mention_ratio: f64,
        /// Most recent clusters considered per candidate
        #[arg(long, default_value_t = 250)]
        max_clusters: usize,
        /// Embed the decision trace in each output line.
        #[arg(long)]
        trace: bool,
    },
    /// Dump the chain alignment of each document pair.
    Align {
        /// Gold JSON-lines corpus
        #[arg(long)]
        gold: PathBuf,
        /// System JSON-lines corpus
        #[arg(long)]
        sys: PathBuf,
    },
}

fn write_output(out: Option<&Path>, text: &str) -> corefsplit::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> corefsplit::Result<()> {
    let out = cli.out.as_deref();
    let text = match cli.command {
        Command::Score {
            gold,
            sys,
            metrics,
            imp_split,
            lea_report,
            strict_formula,
            only_split_docs,
            macro_average,
            per_document,
        } => {
            let opts = ScoreOptions {
                metrics: metrics.into_iter().collect(),
                lea: LeaConfig::new(imp_split, strict_formula)?,
                lea_report,
                only_split_docs,
                macro_average,
                per_document,
            };
            let report = commands::run_score(&Input::read(&gold)?, &Input::read(&sys)?, &opts, cli.jobs)?;
            commands::to_pretty_json(&report)?
        }
        Command::Split { gold, sys, per_anaphor } => {
            let (summary, rows) = commands::run_split(&Input::read(&gold)?, &Input::read(&sys)?, cli.jobs)?;
            if let Some(path) = per_anaphor {
                std::fs::write(path, commands::per_anaphor_tsv(&rows))?;
            }
            commands::to_pretty_json(&summary)?
        }
        Command::Baseline { sys, model, x, pronouns } => {
            let model = match model {
                Model::Recent => BaselineModel::Recent { x },
                Model::Random => BaselineModel::Random { seed: cli.seed },
            };
            let mut cfg = BaselineConfig::new(model)?;
            if let Some(p) = pronouns {
                cfg = cfg.with_pronouns(p);
            }
            commands::run_baseline(&Input::read(&sys)?, &cfg, cli.jobs)?
        }
        Command::Decode {
            scores,
            docs,
            threshold,
            mention_ratio,
            max_clusters,
            trace,
        } => {
            let cfg = DecoderConfig {
                mention_ratio,
                max_clusters,
                split_threshold: threshold,
                ..DecoderConfig::default()
            };
            let docs = docs.as_deref().map(Input::read).transpose()?;
            commands::run_decode(&Input::read(&scores)?, docs.as_ref(), &cfg, trace, cli.jobs)?
        }
        Command::Align { gold, sys } => commands::run_align(&Input::read(&gold)?, &Input::read(&sys)?, cli.jobs)?,
    };
    write_output(out, &text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::DocumentMismatch { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
