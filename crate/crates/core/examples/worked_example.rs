// Two systems resolving the plural anaphors of
// "Mary and John were on their way to visit Alex when Mary saw Jane on
// their way and realized they all wore the same shirt."
//
// Gold: `their` = {Mary, John}, `they` = {Mary, John, Jane}. System A says
// `their` = {Alex, Jane} and makes `they` coreferent with Alex; system B
// says `their` = {Mary, Jane} and `they` = {Mary, John}. Only partial
// credit separates them.

use corefsplit::lea_ext::{self, NormalizedMention};
use corefsplit::{link_reward, Chain, ChainId, DocumentAnnotation, LeaConfig, Mention, MentionId, SplitRelation};

const TEXT: &str = "Mary and John were on their way to visit Alex when Mary saw Jane on their way and realized they all wore the same shirt";

/// Chains: 0 Mary, 1 John, 2 Alex, 3 Jane, 4 their, 5 they.
fn annotate(their: &[u32], they: &[u32]) -> DocumentAnnotation {
    let mut chains = vec![
        Chain { id: ChainId(0), mentions: vec![MentionId(0), MentionId(3)] },
        Chain { id: ChainId(1), mentions: vec![MentionId(1)] },
        Chain { id: ChainId(2), mentions: vec![MentionId(2)] },
        Chain { id: ChainId(3), mentions: vec![MentionId(4)] },
        Chain { id: ChainId(4), mentions: vec![MentionId(5)] },
    ];
    let mut split_relations = vec![SplitRelation {
        anaphor: MentionId(5),
        antecedent_chains: their.iter().map(|&c| ChainId(c)).collect(),
    }];
    match they {
        [single] => chains[*single as usize].mentions.push(MentionId(6)),
        _ => {
            chains.push(Chain { id: ChainId(5), mentions: vec![MentionId(6)] });
            split_relations.push(SplitRelation {
                anaphor: MentionId(6),
                antecedent_chains: they.iter().map(|&c| ChainId(c)).collect(),
            });
        }
    }
    DocumentAnnotation {
        doc_id: "example".into(),
        tokens: TEXT.split(' ').map(String::from).collect(),
        sentences: vec![(0, 25)],
        mentions: [(0, 0), (1, 2), (2, 9), (3, 11), (4, 13), (5, 15), (6, 19)]
            .iter()
            .map(|&(id, t)| Mention::individual(id, t, t + 1))
            .collect(),
        chains,
        non_referring: Default::default(),
        split_relations,
    }
}

fn describe(m: &NormalizedMention, doc: &DocumentAnnotation) -> String {
    let word = |start: usize| doc.tokens[start].clone();
    match m {
        NormalizedMention::Atom { span, .. } => word(span.start),
        NormalizedMention::SetOf(elements) => {
            let names: Vec<String> = elements
                .iter()
                .map(|r| match r {
                    lea_ext::Representative::Gold(s) => word(s.start),
                    lea_ext::Representative::Synthetic(c) => format!("<system chain {c}>"),
                })
                .collect();
            format!("{{{}}}", names.join(", "))
        }
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let gold = annotate(&[0, 1], &[0, 1, 3]);
    let systems = [("A", annotate(&[2, 3], &[2])), ("B", annotate(&[0, 3], &[0, 1]))];

    for (name, sys) in &systems {
        let pair = lea_ext::normalize(sys, &gold)?;
        println!("system {name}");
        for entity in pair.system.iter().filter(|e| e.is_plural()) {
            let (m1, m2) = (&entity.mentions[0], &entity.mentions[1]);
            let reward = link_reward(m1, m2, &pair.gold, &LeaConfig::default());
            println!("  link {} -- {}: reward {reward:.4}", describe(m1, &gold), describe(m2, &gold));
        }
        for imp in [1.0, 10.0] {
            let (score, gold_rows, _) = lea_ext::lea_extended_detailed(&pair.gold, &pair.system, &LeaConfig::new(imp, false)?);
            let plural: Vec<String> = gold_rows
                .iter()
                .filter(|r| r.plural)
                .map(|r| format!("{:.3}", r.resolution_score))
                .collect();
            println!(
                "  imp_split {imp:>4}: R {:.4} P {:.4} F1 {:.4} (gold plural entities resolved {})",
                score.recall,
                score.precision,
                score.f1,
                plural.join(", ")
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
