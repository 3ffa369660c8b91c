use std::collections::{BTreeMap, BTreeSet};

use corefsplit::decoder::{self, option_scores, Candidate, Choice, DecoderConfig, PairScore, ScoreTable};
use corefsplit::MentionId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(seed: u64) -> ScoreTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tokens = rng.gen_range(2..30);
    let n = rng.gen_range(1..=tokens);
    let mut candidates: Vec<Candidate> = (0..n)
        .map(|_| {
            let start = rng.gen_range(0..tokens);
            Candidate {
                start,
                end: rng.gen_range(start + 1..=tokens),
                s_m: rng.gen_range(-1.0..2.0),
                s_no: rng.gen_range(-1.0..1.0),
                s_nr: rng.gen_range(-2.0..0.5),
                s_dn: rng.gen_range(-0.5..1.5),
            }
        })
        .collect();
    candidates.sort_by_key(|c| (c.start, c.end));
    let mut pairwise = BTreeMap::new();
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.6) {
                pairwise.insert((i, j), PairScore { s_mc: rng.gen_range(-3.0..2.0), s_pmc: rng.gen_range(-2.0..3.0) });
            }
        }
    }
    ScoreTable::new("p", tokens, candidates, pairwise).unwrap()
}

fn full() -> DecoderConfig {
    DecoderConfig { mention_ratio: 1.0, ..DecoderConfig::default() }
}

/// Best cluster option, ties to the lower id.
fn best_cluster(options: &[(Choice, f64)]) -> Option<Choice> {
    let mut best: Option<(Choice, f64)> = None;
    for &(c, s) in options.iter().filter(|(c, _)| matches!(c, Choice::Cluster(_))) {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    best.map(|(c, _)| c)
}

proptest! {
    #[test]
    fn chains_partition_attached_mentions(seed in any::<u64>()) {
        let t = table(seed);
        let r = decoder::decode(&t, &DecoderConfig::default()).unwrap();
        let mut seen = BTreeSet::new();
        for c in &r.chains {
            for m in &c.mentions {
                prop_assert!(seen.insert(*m));
            }
        }
        prop_assert!(seen.is_disjoint(&r.non_referring));
        let attached: BTreeSet<MentionId> = r
            .trace
            .decisions
            .iter()
            .filter(|d| !matches!(d.choice, Choice::NonMention | Choice::NonReferring))
            .map(|d| MentionId(d.candidate as u32))
            .collect();
        prop_assert_eq!(seen, attached);
    }

    #[test]
    fn shifting_pair_scores_keeps_best_cluster(seed in any::<u64>(), shift in -5.0f64..5.0) {
        let t = table(seed);
        let cfg = full();
        let r = decoder::decode(&t, &cfg).unwrap();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for d in &r.trace.decisions {
            let i = d.candidate;
            let mut shifted = t.clone();
            for ((a, _), p) in shifted.pairwise.iter_mut() {
                if *a == i {
                    p.s_mc += shift;
                }
            }
            let before = best_cluster(&option_scores(&t, &clusters, i, &cfg));
            let after = best_cluster(&option_scores(&shifted, &clusters, i, &cfg));
            prop_assert_eq!(before, after);
            match d.choice {
                Choice::DiscourseNew => clusters.push(vec![i]),
                Choice::Cluster(c) => clusters[c.0 as usize].push(i),
                _ => {}
            }
        }
    }

    #[test]
    fn replay_is_exact(seed in any::<u64>()) {
        let t = table(seed);
        let cfg = DecoderConfig::default();
        let r = decoder::decode(&t, &cfg).unwrap();
        prop_assert_eq!(decoder::replay(&t, &r.trace, &cfg).unwrap(), r);
    }

    #[test]
    fn splits_respect_contract(seed in any::<u64>()) {
        let t = table(seed);
        let r = decoder::decode(&t, &full()).unwrap();
        for rel in &r.split_relations {
            prop_assert!((2..=5).contains(&rel.antecedent_chains.len()));
            prop_assert_eq!(r.discourse_status[&rel.anaphor], decoder::DiscourseStatus::New);
            // antecedent clusters were all opened before the anaphor
            for c in &rel.antecedent_chains {
                prop_assert!(r.chains[c.0 as usize].mentions[0] < rel.anaphor);
            }
        }
        r.to_document(&t, None, vec![]).validate(corefsplit::Side::System).unwrap();
    }
}
