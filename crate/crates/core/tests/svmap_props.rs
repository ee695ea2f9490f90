mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use setcalc::svmap::{lsc_check, DEFAULT_PROBE_DEPTH};
use setcalc::AxisBox;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>(), fi in 0usize..5, gi in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_sampled(&mut rng), random_sampled(&mut rng));
        let r = functor_laws(&a, &b, &point_map(fi), &point_map(gi));
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn selection_graph_unions_are_lsc(
        picks in prop::collection::vec((0usize..4, -1.5f64..1.5), 1..4),
        lo in -1.5f64..1.0,
        width in 0.05f64..1.0,
    ) {
        let maps = picks.iter().map(|&(k, c)| selection(k, c)).collect();
        let opens = [AxisBox::closed(&[(lo, lo + width)]).unwrap()];
        let r = selection_union_passes(maps, &opens);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }
}

#[test]
fn step_map_has_one_violation_at_zero() {
    let opens = [AxisBox::closed(&[(0.5, 1.5)]).unwrap()];
    let rep = lsc_check(&step_map(), &opens, DEFAULT_PROBE_DEPTH).unwrap();
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].r, vec![0.0]);
    let around_zero = [AxisBox::closed(&[(-0.5, 0.5)]).unwrap()];
    assert!(lsc_check(&step_map(), &around_zero, DEFAULT_PROBE_DEPTH).unwrap().passed());
}
