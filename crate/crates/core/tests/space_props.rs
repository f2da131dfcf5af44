mod common;

use common::*;
use convexity::space::{hull, make_example_space, random_space};
use convexity::{ExampleKind, HullOracle};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_output_is_valid(space in space_strategy(12, 8)) {
        prop_assert_eq!(space.validate(), None);
    }

    #[test]
    fn hull_is_extensive_monotone_idempotent(space in space_strategy(12, 6)) {
        let n = space.n();
        for set in all_subsets(n) {
            let h = hull(&space, &set);
            prop_assert!(set.is_subset(&h));
            prop_assert_eq!(hull(&space, &h), h);
            prop_assert!(space.is_convex(&h));
            for x in 0..n {
                let mut bigger = set;
                bigger.insert(x);
                prop_assert!(h.is_subset(&hull(&space, &bigger)));
            }
        }
    }

    #[test]
    fn hull_is_smallest_convex_superset(space in space_strategy(10, 6)) {
        for set in all_subsets(space.n()) {
            prop_assert_eq!(space.hull(&set), smallest_convex_superset(&space, &set));
        }
    }

    #[test]
    fn json_roundtrip(space in space_strategy(12, 6)) {
        let back = convexity::ConvexitySpace::from_json(&space.to_json()).unwrap();
        prop_assert_eq!(back, space);
    }
}

#[test]
fn builtin_spaces_are_valid() {
    for spec in [
        "interval:9",
        "singleton:9",
        "free:8",
        "box:3x3",
        "box:2x2x2",
    ] {
        let kind: ExampleKind = spec.parse().unwrap();
        let space = make_example_space(&kind).unwrap();
        assert_eq!(space.validate(), None, "{spec}");
        assert_eq!(kind.to_string(), spec);
    }
}

#[test]
fn random_space_is_seeded() {
    let a = random_space(8, 5, 11).unwrap();
    assert_eq!(a, random_space(8, 5, 11).unwrap());
    assert_eq!(a.validate(), None);
}

#[test]
fn interval_hull_spans_extremes() {
    let iv = make_example_space(&ExampleKind::Interval(9)).unwrap();
    assert_eq!(iv.hull(&m(&[2, 6])), m(&[2, 3, 4, 5, 6]));
    assert_eq!(iv.hull(&m(&[])), m(&[]));
}
