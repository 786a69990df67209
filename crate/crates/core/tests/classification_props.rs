mod common;

use common::*;
use conevol::classification::{adjacent_set, classify, hemisphere_witness, is_reducible, positively_spans};
use conevol::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn delta_matches_triple_oracle(u in normal_set_strategy(3, 10)) {
        let c = classify(&u).unwrap();
        prop_assert_eq!(c.delta.clone(), delta_oracle(&u));
        c.check_laws(&u).unwrap();
    }

    #[test]
    fn square_members_are_trapezoid_only(u in normal_set_strategy(4, 10)) {
        let c = classify(&u).unwrap();
        prop_assert!([0, 1, 2, 4].contains(&c.square.len()));
        prop_assert_eq!(c.square.len() == 4, is_reducible(&u).is_some());
        for &i in &c.square {
            let j = u.antipode(i).unwrap();
            let d = hemisphere_witness(&u, i).unwrap();
            prop_assert!(u.vector(j).dot(&d) > 0.0);
            for k in (0..u.len()).filter(|&k| k != j) {
                prop_assert!(u.vector(k).dot(&d) <= 1e-12);
            }
            // every adjacent normal completes a spanning quadruple
            let adj = adjacent_set(&u, i).unwrap();
            prop_assert_eq!(adj.len(), u.len() - 2);
            for &k in &adj {
                let ok = (0..u.len()).any(|l| {
                    l != i && l != j && l != k
                        && spans_by_separation(&[u.vector(i), u.vector(j), u.vector(k), u.vector(l)])
                });
                prop_assert!(ok);
            }
        }
        for i in c.delta.iter().copied() {
            prop_assert_eq!(adjacent_set(&u, i), Err(Error::NotSquareIndex { index: i }));
        }
    }

    #[test]
    fn gap_scan_matches_separation(u in normal_set_strategy(3, 8), drop in 0usize..8) {
        let mut vs: Vec<_> = u.vectors().to_vec();
        if drop < vs.len() {
            vs.remove(drop);
        }
        prop_assert_eq!(positively_spans(&vs), spans_by_separation(&vs));
    }
}

#[test]
fn fuzzed_sets_obey_laws() {
    let sets = fuzz_normal_sets(1000, 3, 12, 17);
    let mut seen = [0usize; 5];
    for u in &sets {
        let c = classify(u).unwrap();
        c.check_laws(u).unwrap();
        assert_eq!(c.delta, delta_oracle(u));
        seen[c.square.len()] += 1;
    }
    // the generator reaches every admissible cardinality
    assert!(seen[0] > 0 && seen[1] > 0 && seen[2] > 0 && seen[4] > 0, "{seen:?}");
}
