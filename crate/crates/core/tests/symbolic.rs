mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use snsr_core::rules::*;

#[test]
fn forward_chain_equals_minimal_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for _ in 0..200 {
        let (rb, facts) = random_rulebase(&mut rng, 10, 15);
        if forward_chain(&rb, &facts).unwrap() != brute_force_closure(&rb, &facts) {
            mismatches += 1;
        }
    }
    assert_eq!(mismatches, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_monotone_idempotent_and_order_free(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rb, facts) = random_rulebase(&mut rng, 10, 15);
        let c = forward_chain(&rb, &facts).unwrap();
        prop_assert!(facts.is_subset(&c));
        prop_assert_eq!(&forward_chain(&rb, &c).unwrap(), &c);
        let mut clauses = rb.clauses().to_vec();
        clauses.shuffle(&mut rng);
        let shuffled = RuleBase::new(rb.atoms().iter().cloned(), clauses).unwrap();
        prop_assert_eq!(forward_chain(&shuffled, &facts).unwrap(), c);
    }

    #[test]
    fn hard_projection_threshold_monotone(ys in prop::collection::vec(-3.0f64..3.0, 1..20), t in -2.0f64..2.0, dt in 0.0f64..1.0) {
        let y = snsr_core::BeliefVector::vertex(ys).unwrap();
        let lo = project_predicates(&y, t, ProjectionMode::Hard).unwrap();
        let hi = project_predicates(&y, t + dt, ProjectionMode::Hard).unwrap();
        let lo: BTreeSet<usize> = lo.true_indices().into_iter().collect();
        let hi: BTreeSet<usize> = hi.true_indices().into_iter().collect();
        prop_assert!(hi.is_subset(&lo));
    }
}
