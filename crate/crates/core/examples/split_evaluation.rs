// Recognition, lenient and strict scores for split-antecedent anaphors.
// System chains are mapped to gold chains by their CEAF alignment first, so
// the ids a system uses do not matter.

use corefsplit::model::parse_document;
use corefsplit::{split_eval, Side};

const GOLD: &str = r#"{"doc_id":"s","tokens":["Ann","met","Bob","and","Cy",".","The","three","talked",".","Both","men","left"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":4,"end":5},{"id":3,"start":6,"end":8},{"id":4,"start":10,"end":12}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]},{"id":3,"mentions":[3]},{"id":4,"mentions":[4]}],"split_relations":[{"anaphor":3,"antecedent_chains":[0,1,2]},{"anaphor":4,"antecedent_chains":[1,2]}]}"#;

// Renumbered chains; "The three" gets two of its three antecedents and
// "Both men" is resolved exactly.
const SYS: &str = r#"{"doc_id":"s","tokens":["Ann","met","Bob","and","Cy",".","The","three","talked",".","Both","men","left"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":4,"end":5},{"id":3,"start":6,"end":8},{"id":4,"start":10,"end":12}],"chains":[{"id":7,"mentions":[0]},{"id":8,"mentions":[1]},{"id":9,"mentions":[2]},{"id":10,"mentions":[3]},{"id":11,"mentions":[4]}],"split_relations":[{"anaphor":3,"antecedent_chains":[7,8]},{"anaphor":4,"antecedent_chains":[8,9]}]}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gold = parse_document(GOLD, Side::Gold, 1)?;
    let sys = parse_document(SYS, Side::System, 1)?;
    let report = split_eval::evaluate(&gold, &sys)?;
    for (name, s) in [
        ("recognition", report.recognition),
        ("lenient", report.lenient),
        ("strict", report.strict),
        ("lenient macro", report.lenient_macro),
    ] {
        println!("{name:>13}  R {:.3}  P {:.3}  F1 {:.3}", s.recall, s.precision, s.f1);
    }
    for row in &report.per_anaphor {
        println!(
            "anaphor {}: {}/{} antecedents correct, strict {}",
            row.span,
            row.correct_antecedents,
            row.gold_antecedents,
            row.strict_correct()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
