// Corpus scoring: standard metrics, the CoNLL average, plural-aware LEA and
// non-referring F1, summed over documents.

use corefsplit::commands::{self, Metadata, Metric, ScoreOptions};
use corefsplit::model::read_documents;
use corefsplit::{LeaConfig, Side};

const GOLD: &str = r#"{"doc_id":"a","tokens":["Kim","and","Lee","came",".","They","sat",".","Kim","smiled"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":5,"end":6},{"id":3,"start":8,"end":9}],"chains":[{"id":0,"mentions":[0,3]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]}],"split_relations":[{"anaphor":2,"antecedent_chains":[0,1]}]}
{"doc_id":"b","tokens":["It","snowed",".","Ada","said","she","left"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":3,"end":4},{"id":2,"start":5,"end":6}],"chains":[{"id":0,"mentions":[1,2]}],"non_referring":[0]}
"#;

// Misses the second "Kim" link and treats "It" as referring.
const SYS: &str = r#"{"doc_id":"a","tokens":["Kim","and","Lee","came",".","They","sat",".","Kim","smiled"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":5,"end":6},{"id":3,"start":8,"end":9}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]},{"id":3,"mentions":[3]}],"split_relations":[{"anaphor":2,"antecedent_chains":[0,1]}]}
{"doc_id":"b","tokens":["It","snowed",".","Ada","said","she","left"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":3,"end":4},{"id":2,"start":5,"end":6}],"chains":[{"id":0,"mentions":[1,2]},{"id":1,"mentions":[0]}]}
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gold = read_documents(GOLD.as_bytes(), Side::Gold)?;
    let sys = read_documents(SYS.as_bytes(), Side::System)?;
    let opts = ScoreOptions {
        metrics: [Metric::DEFAULT.as_slice(), &[Metric::LeaStandard]].concat().into_iter().collect(),
        lea: LeaConfig::new(10.0, false)?,
        per_document: true,
        ..ScoreOptions::default()
    };
    let report = commands::score_corpus(&gold, &sys, &opts, Metadata::new(opts.clone(), &[]))?;
    for (name, value) in &report.corpus {
        println!("{name:>12}  F1 {:.4}", value.f1());
    }
    println!("{}", commands::to_pretty_json(&report.per_document)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
