// Optimal one-to-one chain alignment under φ4 similarity, on a raw weight
// matrix and between two annotated documents.

use corefsplit::model::parse_document;
use corefsplit::{align_chains, max_weight_matching, Side};

const GOLD: &str = r#"{"doc_id":"g","tokens":["a","b","c","d","e","f"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":1,"end":2},{"id":2,"start":2,"end":3},{"id":3,"start":3,"end":4},{"id":4,"start":4,"end":5}],"chains":[{"id":0,"mentions":[0,1,2]},{"id":1,"mentions":[3,4]}]}"#;
const SYS: &str = r#"{"doc_id":"g","tokens":["a","b","c","d","e","f"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":1,"end":2},{"id":2,"start":2,"end":3},{"id":3,"start":3,"end":4},{"id":5,"start":5,"end":6}],"chains":[{"id":10,"mentions":[0,1]},{"id":11,"mentions":[2,3]},{"id":12,"mentions":[5]}]}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let weights = vec![vec![0.6, 0.5], vec![0.9, 0.1]];
    let m = max_weight_matching(&weights)?;
    println!("matrix pairs {:?}, total {:.2}", m.pairs, m.total_similarity);

    let gold = parse_document(GOLD, Side::Gold, 1)?;
    let sys = parse_document(SYS, Side::System, 1)?;
    let alignment = align_chains(&gold, &sys)?;
    for p in &alignment.pairs {
        println!("gold chain {} <-> system chain {}: phi4 {:.3}", p.gold, p.system, p.phi4);
    }
    println!("unmatched system chains: {:?}", alignment.unmatched_system);
    println!("{}", serde_json::to_string_pretty(&alignment)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
