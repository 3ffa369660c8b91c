// Reading JSON-lines annotations: validation errors name the offending
// line or id, and split relations expand into explicit plural mentions.

use corefsplit::model::read_documents;
use corefsplit::{MentionKind, Side};

const GOOD: &str = r#"{"doc_id":"ok","tokens":["Mia","met","Leo",".","They","ate"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":2,"end":3},{"id":2,"start":4,"end":5}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]},{"id":2,"mentions":[2]}],"split_relations":[{"anaphor":2,"antecedent_chains":[0,1]}]}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let bad_inputs = [
        r#"{"doc_id":"x","tokens":["a"],"mentions":[{"id":0,"start":0,"end":3}],"chains":[{"id":0,"mentions":[0]}]}"#,
        r#"{"doc_id":"y","tokens":["a","b"],"mentions":[{"id":0,"start":0,"end":1},{"id":1,"start":1,"end":2}],"chains":[{"id":0,"mentions":[0]},{"id":1,"mentions":[1]}],"split_relations":[{"anaphor":1,"antecedent_chains":[0]}]}"#,
        r#"{"doc_id": "z", "tokens": ["#,
    ];
    for raw in bad_inputs {
        let text = format!("{GOOD}\n{raw}\n");
        match read_documents(text.as_bytes(), Side::System) {
            Ok(_) => println!("unexpectedly valid"),
            Err(e) => println!("rejected: {e}"),
        }
    }

    let docs = read_documents(GOOD.as_bytes(), Side::Gold)?;
    let full = docs[0].materialize_plurals()?;
    for chain in &full.chains {
        let parts: Vec<String> = chain
            .mentions
            .iter()
            .map(|id| match &full.mention(*id).unwrap().kind {
                MentionKind::Individual(span) => full.tokens[span.start..span.end].join(" "),
                MentionKind::Plural { elements, .. } => format!(
                    "{{{}}}",
                    elements.iter().map(|e| full.surface(*e).unwrap_or_default()).collect::<Vec<_>>().join(", ")
                ),
            })
            .collect();
        println!("chain {}: {}", chain.id, parts.join(" | "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
