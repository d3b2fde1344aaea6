//! Property tests for the relational layer: union monoid laws, containment
//! as a partial order, retrieval soundness, and entropy bounds.

mod common;

use proptest::prelude::*;

use common::{constituent_function, random_relation_pair};
use eam_core::ric::{abstraction, containment, entropy, reduction, SamplerPolicy};
use eam_core::seeding;
use eam_core::Relation;

/// Strategy: a relation up to 8x16 along with the RNG seed that built it.
fn relation_strategy() -> impl Strategy<Value = Relation> {
    (1usize..=8, 1usize..=16, 0.0f64..=1.0, any::<u64>()).prop_map(
        |(n_args, n_vals, density, seed)| {
            let mut rng = seeding::rng(seed);
            random_relation_pair(&mut rng, n_args, n_vals, density).0
        },
    )
}

/// Two relations with matching dimensions.
fn relation_pair_strategy() -> impl Strategy<Value = (Relation, Relation)> {
    (1usize..=8, 1usize..=16, 0.0f64..=1.0, any::<u64>(), any::<u64>()).prop_map(
        |(n_args, n_vals, density, s1, s2)| {
            let mut r1 = seeding::rng(s1);
            let mut r2 = seeding::rng(s2);
            (
                random_relation_pair(&mut r1, n_args, n_vals, density).0,
                random_relation_pair(&mut r2, n_args, n_vals, density).0,
            )
        },
    )
}

fn triple_strategy() -> impl Strategy<Value = (Relation, Relation, Relation)> {
    (1usize..=6, 1usize..=12, any::<[u64; 3]>()).prop_map(|(n_args, n_vals, seeds)| {
        let mut make = |s| {
            let mut rng = seeding::rng(s);
            random_relation_pair(&mut rng, n_args, n_vals, 0.3).0
        };
        (make(seeds[0]), make(seeds[1]), make(seeds[2]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1500))]

    #[test]
    fn union_is_commutative((a, b) in relation_pair_strategy()) {
        prop_assert_eq!(abstraction(&a, &b).unwrap(), abstraction(&b, &a).unwrap());
    }

    #[test]
    fn union_is_associative((a, b, c) in triple_strategy()) {
        let left = abstraction(&abstraction(&a, &b).unwrap(), &c).unwrap();
        let right = abstraction(&a, &abstraction(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn union_is_idempotent_with_identity(a in relation_strategy()) {
        prop_assert_eq!(abstraction(&a, &a).unwrap(), a.clone());
        let empty = Relation::empty(a.n_args(), a.n_vals());
        prop_assert_eq!(abstraction(&a, &empty).unwrap(), a);
    }

    #[test]
    fn containment_is_a_partial_order((a, b, c) in triple_strategy()) {
        // reflexive
        prop_assert!(containment(&a, &a).unwrap());
        // antisymmetric
        if containment(&a, &b).unwrap() && containment(&b, &a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
        // transitive on a constructed chain a <= a|b <= a|b|c
        let ab = abstraction(&a, &b).unwrap();
        let abc = abstraction(&ab, &c).unwrap();
        prop_assert!(containment(&a, &ab).unwrap());
        prop_assert!(containment(&ab, &abc).unwrap());
        prop_assert!(containment(&a, &abc).unwrap());
    }

    #[test]
    fn union_contains_both_operands((a, b) in relation_pair_strategy()) {
        let u = abstraction(&a, &b).unwrap();
        prop_assert!(containment(&a, &u).unwrap());
        prop_assert!(containment(&b, &u).unwrap());
    }

    #[test]
    fn retrieved_functions_are_constituents(r in relation_strategy(), seed in any::<u64>()) {
        let mut rng = seeding::rng(seed);
        if let Some(cue) = constituent_function(&mut rng, &r) {
            let got = reduction(&cue, &r, SamplerPolicy::Triangular, seed)
                .unwrap()
                .expect("constituent cues are contained");
            let got_rel = Relation::from_function(&got, r.n_vals()).unwrap();
            prop_assert!(containment(&got_rel, &r).unwrap());
        }
    }

    #[test]
    fn entropy_is_bounded_and_union_monotone((a, b) in relation_pair_strategy()) {
        let u = abstraction(&a, &b).unwrap();
        let (ea, eb, eu) = (entropy(&a), entropy(&b), entropy(&u));
        prop_assert!((0.0..=(a.n_vals() as f64).log2() + 1e-12).contains(&ea));
        prop_assert!(eu >= ea.max(eb) - 1e-12);
    }
}
