// Score table in, system annotation out: prune candidates, rank clusters
// left to right, attach split antecedents, then check the result against
// gold and replay the decision trace.

use std::collections::BTreeMap;

use corefsplit::decoder::{self, Candidate, DecoderConfig, PairScore, ScoreTable};
use corefsplit::model::parse_document;
use corefsplit::{split_eval, Side};

const GOLD: &str = r#"{"doc_id":"d","tokens":["Pat","called","Sam",".","She","and","he","argued",".","They","made","up"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":4,"end":5},{"id":3,"start":6,"end":7},{"id":4,"start":9,"end":10}],"chains":[{"id":0,"mentions":[0,2]},{"id":1,"mentions":[1,3]},{"id":2,"mentions":[4]}],"split_relations":[{"anaphor":4,"antecedent_chains":[0,1]}]}"#;

fn candidate(start: usize, s_m: f64) -> Candidate {
    Candidate { start, end: start + 1, s_m, s_no: 0.0, s_nr: -4.0, s_dn: 0.2 }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Pat, Sam, She, he, They, plus a weak candidate on "called"
    let candidates = vec![
        candidate(0, 1.0),
        candidate(1, -2.0),
        candidate(2, 1.0),
        candidate(4, 1.0),
        candidate(6, 1.0),
        candidate(9, 1.0),
    ];
    let pair = |s_mc: f64, s_pmc: f64| PairScore { s_mc, s_pmc };
    let pairwise: BTreeMap<(usize, usize), PairScore> = [
        ((2, 0), pair(-2.0, 0.0)),
        ((3, 0), pair(1.5, 0.0)),
        ((3, 2), pair(-2.0, 0.0)),
        ((4, 0), pair(-2.0, 0.0)),
        ((4, 2), pair(1.5, 0.0)),
        ((4, 3), pair(-3.0, 0.0)),
        ((5, 0), pair(-3.0, 1.0)),
        ((5, 2), pair(-3.0, 1.0)),
        ((5, 3), pair(-3.0, 0.5)),
        ((5, 4), pair(-3.0, 0.5)),
    ]
    .into_iter()
    .collect();
    let table = ScoreTable::new("d", 12, candidates, pairwise)?;

    // 0.5 × 12 tokens keeps six candidates; the default 0.4 would keep four
    let cfg = DecoderConfig { mention_ratio: 0.5, ..DecoderConfig::default() };
    let result = decoder::decode(&table, &cfg)?;
    for d in &result.trace.decisions {
        println!("candidate {} -> {:?} ({:.2})", d.candidate, d.choice, d.score);
    }
    for s in &result.trace.splits {
        println!("split anaphor {} -> {:?}", s.candidate, s.antecedents);
    }

    let gold = parse_document(GOLD, Side::Gold, 1)?;
    let sys = result.to_document(&table, Some(gold.tokens.clone()), vec![]);
    let report = split_eval::evaluate(&gold, &sys)?;
    println!("split strict F1 against gold: {:.3}", report.strict.f1);

    let replayed = decoder::replay(&table, &result.trace, &cfg)?;
    println!("replay identical: {}", replayed == result);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
