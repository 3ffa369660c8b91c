//! Random corpora and brute-force reference scorers shared by the
//! integration tests. The oracles work directly from the metric definitions
//! (link and mention enumeration, exhaustive matchings) and share no code
//! with the library.
#![allow(dead_code)]

use std::collections::BTreeSet;

use corefsplit::{Chain, ChainId, DocumentAnnotation, Mention, MentionId, SplitRelation};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Chains = Vec<BTreeSet<u32>>;

/// Random partition of `keys` into non-empty sets.
pub fn partition<R: Rng>(rng: &mut R, keys: &[u32]) -> Chains {
    let mut out: Chains = Vec::new();
    for &k in keys {
        let slot = rng.gen_range(0..=out.len());
        if slot == out.len() {
            out.push(BTreeSet::new());
        }
        out[slot].insert(k);
    }
    out
}

/// Gold and system chains over keys `0..n`. The system drops some keys and
/// adds spurious ones from `100..`.
pub fn chain_pair<R: Rng>(rng: &mut R, max_mentions: usize) -> (Chains, Chains) {
    let n = rng.gen_range(1..=max_mentions) as u32;
    let gold_keys: Vec<u32> = (0..n).collect();
    let mut sys_keys: Vec<u32> = gold_keys.iter().copied().filter(|_| rng.gen_bool(0.8)).collect();
    for extra in 0..rng.gen_range(0..3u32) {
        sys_keys.push(100 + extra);
    }
    sys_keys.shuffle(rng);
    (partition(rng, &gold_keys), partition(rng, &sys_keys))
}

/// Document whose mention `k` covers tokens [2k, 2k + 1). Every third
/// mention reads "they" so the pronoun heuristic has something to find.
pub fn document(doc_id: &str, chains: &Chains, splits: &[(u32, Vec<u32>)]) -> DocumentAnnotation {
    let max_key = chains.iter().flatten().copied().max().unwrap_or(0);
    let mut mentions = Vec::new();
    let mut out = Vec::new();
    for (c, chain) in chains.iter().enumerate() {
        for &k in chain {
            mentions.push(Mention::individual(k, 2 * k as usize, 2 * k as usize + 1));
        }
        out.push(Chain {
            id: ChainId(c as u32),
            mentions: chain.iter().map(|&k| MentionId(k)).collect(),
        });
    }
    DocumentAnnotation {
        doc_id: doc_id.into(),
        tokens: (0..2 * max_key as usize + 2)
            .map(|t| if t % 6 == 4 { "they" } else { "w" }.to_string())
            .collect(),
        sentences: vec![],
        mentions,
        chains: out,
        non_referring: BTreeSet::new(),
        split_relations: splits
            .iter()
            .map(|(a, cs)| SplitRelation {
                anaphor: MentionId(*a),
                antecedent_chains: cs.iter().map(|&c| ChainId(c)).collect(),
            })
            .collect(),
    }
}

/// Split relations for up to two singleton chains, each taking 2..=4 other
/// chains that hold no anaphor.
pub fn random_splits<R: Rng>(rng: &mut R, chains: &Chains) -> Vec<(u32, Vec<u32>)> {
    let singletons: Vec<usize> = (0..chains.len()).filter(|&c| chains[c].len() == 1).collect();
    let mut anaphor_chains: Vec<usize> = singletons.choose_multiple(rng, 2).copied().collect();
    anaphor_chains.truncate(rng.gen_range(0..=2));
    let others: Vec<u32> = (0..chains.len())
        .filter(|c| !anaphor_chains.contains(c))
        .map(|c| c as u32)
        .collect();
    if others.len() < 2 {
        return vec![];
    }
    anaphor_chains
        .into_iter()
        .map(|c| {
            let k = rng.gen_range(2..=others.len().min(4));
            let mut picked: Vec<u32> = others.choose_multiple(rng, k).copied().collect();
            picked.sort();
            (*chains[c].iter().next().unwrap(), picked)
        })
        .collect()
}

/// Gold and system documents with split relations on both sides.
pub fn split_document_pair<R: Rng>(rng: &mut R, id: &str, max_mentions: usize) -> (DocumentAnnotation, DocumentAnnotation) {
    let (g, s) = chain_pair(rng, max_mentions);
    let gs = random_splits(rng, &g);
    let ss = random_splits(rng, &s);
    (document(id, &g, &gs), document(id, &s, &ss))
}

fn find(chains: &Chains, m: u32) -> Option<usize> {
    chains.iter().position(|c| c.contains(&m))
}

fn ratio(n: f64, d: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        n / d
    }
}

/// (recall, precision) from two one-sided (num, den) pairs.
fn rp(r: (f64, f64), p: (f64, f64)) -> (f64, f64) {
    (ratio(r.0, r.1), ratio(p.0, p.1))
}

/// MUC via union-find: a key entity's links are recovered by the response
/// when they join mentions the response also joins.
fn muc_side(keys: &Chains, resp: &Chains) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let ms: Vec<u32> = k.iter().copied().collect();
        let mut parent: Vec<usize> = (0..ms.len()).collect();
        fn root(p: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while p[i] != i {
                i = p[i];
            }
            i
        }
        for a in 0..ms.len() {
            for b in a + 1..ms.len() {
                let (fa, fb) = (find(resp, ms[a]), find(resp, ms[b]));
                if fa.is_some() && fa == fb {
                    let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let components = (0..ms.len()).filter(|&i| root(&mut parent, i) == i).count();
        num += (ms.len() - components) as f64;
        den += (ms.len() - 1) as f64;
    }
    (num, den)
}

pub fn muc(gold: &Chains, sys: &Chains) -> (f64, f64) {
    rp(muc_side(gold, sys), muc_side(sys, gold))
}

/// B³ mention by mention.
fn b3_side(keys: &Chains, resp: &Chains) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        for m in k {
            den += 1.0;
            if let Some(r) = find(resp, *m) {
                num += k.intersection(&resp[r]).count() as f64 / k.len() as f64;
            }
        }
    }
    (num, den)
}

pub fn b_cubed(gold: &Chains, sys: &Chains) -> (f64, f64) {
    rp(b3_side(gold, sys), b3_side(sys, gold))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Maximum total weight over all injections, by enumerating permutations of
/// the zero-padded square matrix.
pub fn best_matching(weights: &[Vec<f64>]) -> f64 {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    let n = rows.max(cols);
    permutations(n)
        .into_iter()
        .map(|p| {
            (0..rows)
                .filter(|&r| p[r] < cols)
                .map(|r| weights[r][p[r]])
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

pub fn ceaf_e(gold: &Chains, sys: &Chains) -> (f64, f64) {
    let w: Vec<Vec<f64>> = gold
        .iter()
        .map(|g| {
            sys.iter()
                .map(|s| 2.0 * g.intersection(s).count() as f64 / (g.len() + s.len()) as f64)
                .collect()
        })
        .collect();
    let total = best_matching(&w);
    (ratio(total, gold.len() as f64), ratio(total, sys.len() as f64))
}

/// LEA by enumerating every link of every key entity. A singleton's
/// self-link counts when its mention occurs anywhere in the response.
fn lea_side(keys: &Chains, resp: &Chains) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let ms: Vec<u32> = k.iter().copied().collect();
        let (mut links, mut found) = (0usize, 0usize);
        if ms.len() == 1 {
            links = 1;
            found = usize::from(find(resp, ms[0]).is_some());
        } else {
            for a in 0..ms.len() {
                for b in a + 1..ms.len() {
                    links += 1;
                    if resp.iter().any(|r| r.contains(&ms[a]) && r.contains(&ms[b])) {
                        found += 1;
                    }
                }
            }
        }
        num += ms.len() as f64 * found as f64 / links as f64;
        den += ms.len() as f64;
    }
    (num, den)
}

pub fn lea(gold: &Chains, sys: &Chains) -> (f64, f64) {
    rp(lea_side(gold, sys), lea_side(sys, gold))
}

pub fn f1(r: f64, p: f64) -> f64 {
    if r + p == 0.0 {
        0.0
    } else {
        2.0 * r * p / (r + p)
    }
}
