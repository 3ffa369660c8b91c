mod common;

use std::collections::BTreeSet;

use corefsplit::{b_cubed, ceaf_phi4, lea_standard, max_weight_matching, muc, phi4};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::Chains;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

fn set(keys: &[u32]) -> BTreeSet<u32> {
    keys.iter().copied().collect()
}

// Reference values below were produced by the brute-force scorers in
// `common` and are pinned so that both sides are checked.

#[test]
fn frozen_phi4_overlap() {
    let (a, b) = (set(&[1, 2]), set(&[1, 3]));
    let overlap = a.iter().filter(|k| b.contains(k)).count();
    assert_eq!(2.0 * overlap as f64 / 4.0, 0.5);
    assert_eq!(phi4(&a, &b).unwrap(), 0.5);
}

#[test]
fn frozen_crossing_matching() {
    let w = vec![vec![0.6, 0.5], vec![0.9, 0.1]];
    assert!(close(common::best_matching(&w), 1.4));
    let r = max_weight_matching(&w).unwrap();
    assert_eq!(r.pairs, vec![(0, 1), (1, 0)]);
    assert!(close(r.total_similarity, 1.4));
}

#[test]
fn frozen_standard_metric_values() {
    let abc: Chains = vec![set(&[0, 1, 2])];
    let ab_c: Chains = vec![set(&[0, 1]), set(&[2])];
    assert_eq!(common::muc(&abc, &ab_c), (0.5, 1.0));
    assert!(close(common::lea(&abc, &ab_c).0, 1.0 / 3.0));
    assert_eq!(common::lea(&abc, &ab_c).1, 1.0);

    let abcd: Chains = vec![set(&[0, 1, 2, 3])];
    let ab_cd: Chains = vec![set(&[0, 1]), set(&[2, 3])];
    assert_eq!(common::b_cubed(&abcd, &ab_cd), (0.5, 1.0));
    assert_eq!(common::b_cubed(&ab_cd, &abcd), (1.0, 0.5));

    let (r, p) = common::ceaf_e(&ab_c, &abc);
    assert!(close(r, 0.4) && close(p, 0.8));

    let s = ceaf_phi4(&ab_c, &abc).unwrap();
    assert!(close(s.recall, 0.4) && close(s.precision, 0.8));
}

fn chains_strategy() -> impl Strategy<Value = (Chains, Chains)> {
    any::<u64>().prop_map(|seed| common::chain_pair(&mut ChaCha8Rng::seed_from_u64(seed), 12))
}

fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (0usize..=6, 0usize..=6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], c), r)
    })
}

proptest! {
    #[test]
    fn muc_matches_oracle((g, s) in chains_strategy()) {
        let lib = muc(&g, &s);
        let (r, p) = common::muc(&g, &s);
        prop_assert!(close(lib.recall, r) && close(lib.precision, p));
    }

    #[test]
    fn b_cubed_matches_oracle((g, s) in chains_strategy()) {
        let lib = b_cubed(&g, &s);
        let (r, p) = common::b_cubed(&g, &s);
        prop_assert!(close(lib.recall, r) && close(lib.precision, p));
    }

    #[test]
    fn ceaf_matches_oracle((g, s) in chains_strategy()) {
        prop_assume!(g.len() <= 7 && s.len() <= 7);
        let lib = ceaf_phi4(&g, &s).unwrap();
        let (r, p) = common::ceaf_e(&g, &s);
        prop_assert!(close(lib.recall, r) && close(lib.precision, p));
    }

    #[test]
    fn lea_matches_oracle((g, s) in chains_strategy()) {
        let lib = lea_standard(&g, &s);
        let (r, p) = common::lea(&g, &s);
        prop_assert!(close(lib.recall, r) && close(lib.precision, p));
    }

    #[test]
    fn swapping_sides_swaps_recall_and_precision((g, s) in chains_strategy()) {
        for (a, b) in [(muc(&g, &s), muc(&s, &g)), (b_cubed(&g, &s), b_cubed(&s, &g)), (lea_standard(&g, &s), lea_standard(&s, &g))] {
            prop_assert_eq!(a.recall, b.precision);
            prop_assert_eq!(a.precision, b.recall);
        }
    }

    #[test]
    fn matching_is_optimal(w in matrix_strategy()) {
        let r = max_weight_matching(&w).unwrap();
        prop_assert!((r.total_similarity - common::best_matching(&w)).abs() < 1e-9);
        let rows: BTreeSet<_> = r.pairs.iter().map(|p| p.0).collect();
        let cols: BTreeSet<_> = r.pairs.iter().map(|p| p.1).collect();
        prop_assert_eq!(rows.len(), r.pairs.len());
        prop_assert_eq!(cols.len(), r.pairs.len());
        let sum: f64 = r.pairs.iter().map(|&(i, j)| w[i][j]).sum();
        prop_assert!((sum - r.total_similarity).abs() < 1e-12);
    }

    #[test]
    fn matching_invariant_under_permutation(w in matrix_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<usize> = (0..w.len()).collect();
        rows.shuffle(&mut rng);
        let permuted: Vec<Vec<f64>> = rows.iter().map(|&r| w[r].clone()).collect();
        let a = max_weight_matching(&w).unwrap().total_similarity;
        let b = max_weight_matching(&permuted).unwrap().total_similarity;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn phi4_is_symmetric(a in prop::collection::btree_set(0u32..20, 1..8), b in prop::collection::btree_set(0u32..20, 1..8)) {
        prop_assert_eq!(phi4(&a, &b).unwrap(), phi4(&b, &a).unwrap());
    }
}
