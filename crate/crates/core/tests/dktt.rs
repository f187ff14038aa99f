mod common;

use std::sync::Arc;

use kinsy::dktt::Dktt;
use kinsy::kinetic::{EventQueue, Owner};
use kinsy::motion::{Polynomial, TimeInstant};
use proptest::prelude::*;

#[test]
fn fuzz_against_linear_scan() {
    for seed in 0..3 {
        let r = common::dktt_fuzz(seed, 2000, 200);
        assert!(r.mismatches.is_empty(), "seed {}: {:?}", seed, r.mismatches);
        assert!(r.events > 0 && r.sample_checks == 200);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn static_build_finds_the_minimum(values in prop::collection::vec((-50i64..=50, -5i64..=5), 1..60)) {
        let mut q = EventQueue::new(TimeInstant::zero());
        let elems: Vec<(u32, Arc<Polynomial>)> = values
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (i as u32, Arc::new(Polynomial::from_i64(&[*a, *b]))))
            .collect();
        let t = Dktt::build(Owner::Nearest, 0, 0, elems.clone(), &mut q).unwrap();
        prop_assert_eq!(t.winner(), common::argmin(&elems, q.now()));
        t.audit(q.now()).unwrap();
    }
}
