//! Property tests over randomly generated carriers, systems and subsets.

use std::collections::BTreeSet;

use proptest::prelude::*;

use ggt_core::carrier::{Carrier, Operation, OperationSystem, Repr, Tier};
use ggt_core::structure::derivations;
use ggt_core::tspace::generate_space;
use ggt_core::witness::Witness;
use ggt_core::Subset;

fn subset_of(n: usize) -> impl Strategy<Value = Subset> {
    prop::collection::btree_set(0..n, 0..=n).prop_map(|s| s.into_iter().collect())
}

fn oracle(s: &Subset) -> BTreeSet<usize> {
    s.iter().collect()
}

/// A generated partial system on `0..n` with one binary and one unary operation.
fn partial_system() -> impl Strategy<Value = OperationSystem> {
    (1usize..=5).prop_flat_map(|n| {
        let cell = prop::option::weighted(0.7, 0..n);
        (
            prop::collection::vec(cell.clone(), n * n),
            prop::collection::vec(cell, n),
        )
            .prop_map(move |(bin, un)| {
                let ops = vec![
                    Operation::new("g", n, 2, bin).unwrap(),
                    Operation::new("h", n, 1, un).unwrap(),
                ];
                OperationSystem::new(Carrier::range(n), Tier::PartialGeneralized, Repr::Generated, ops).unwrap()
            })
    })
}

fn system_and_subset() -> impl Strategy<Value = (OperationSystem, Subset)> {
    partial_system().prop_flat_map(|sys| {
        let n = sys.n();
        (Just(sys), subset_of(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn subset_ops_match_btreeset(a in subset_of(64), b in subset_of(64)) {
        let (x, y) = (oracle(&a), oracle(&b));
        prop_assert_eq!(oracle(&a.union(&b)), x.union(&y).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(oracle(&a.intersection(&b)), x.intersection(&y).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(oracle(&a.difference(&b)), x.difference(&y).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(a.is_subset(&b), x.is_subset(&y));
        prop_assert_eq!(a.len(), x.len());
        prop_assert_eq!(Subset::min(&a), x.first().copied());
    }

    #[test]
    fn subset_laws(a in subset_of(40), b in subset_of(40), c in subset_of(40)) {
        let n = 40;
        prop_assert_eq!(a.union(&b.intersection(&c)), a.union(&b).intersection(&a.union(&c)));
        prop_assert_eq!(a.union(&b).complement(n), a.complement(n).intersection(&b.complement(n)));
        prop_assert_eq!(a.complement(n).complement(n), a.clone());
        prop_assert!(a.intersection(&b).is_subset(&a));
        prop_assert_eq!(Subset::from_mask(a.mask()), a);
    }

    #[test]
    fn witness_json_round_trip(op in 0usize..5, args in prop::collection::vec(0usize..8, 1..4),
                               map in prop::collection::vec(prop::option::of(0usize..8), 8),
                               set in subset_of(8), value in 0usize..8) {
        let ws = [
            Witness::Escape { op, args: args.clone(), value, set: set.clone() },
            Witness::NotTSpace { set },
            Witness::Commutation { op, args, map, lhs: Some(value), rhs: None },
        ];
        for w in ws {
            let text = serde_json::to_string(&w).unwrap();
            prop_assert_eq!(serde_json::from_str::<Witness>(&text).unwrap(), w);
        }
    }

    #[test]
    fn generation_is_monotone_and_shrinking((sys, u) in system_and_subset(), extra in subset_of(5)) {
        let s = generate_space(&sys, &u).unwrap();
        let v = u.union(&extra.intersection(&Subset::full(sys.n())));
        prop_assert!(s.is_subset(&generate_space(&sys, &v).unwrap()));
        prop_assert!(generate_space(&sys, &s).unwrap().is_subset(&s));
    }

    #[test]
    fn derivations_cover_and_evaluate((sys, u) in system_and_subset()) {
        let s = generate_space(&sys, &u).unwrap();
        let d = derivations(&sys, &u).unwrap();
        prop_assert_eq!(d.keys().copied().collect::<Subset>(), s);
        for (v, t) in &d {
            let got = t
                .eval_with(&|x| Some(x), &|op, a| Ok(sys.ops[op].eval(a)))
                .unwrap();
            prop_assert_eq!(got, Some(*v));
            prop_assert!(t.leaves().iter().all(|x| u.contains(*x)));
        }
    }
}
