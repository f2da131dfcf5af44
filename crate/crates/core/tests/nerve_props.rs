mod common;

use common::*;
use convexity::nerve::{
    check_n5_abstract, compute_nerve, compute_nerve_on, lift, n5_witness, nerve_to_space,
    up_closure, Nerve, PermutationGroup, UpFamily,
};
use convexity::space::{intersection_closure, make_example_space};
use convexity::{ConvexitySpace, ExampleKind, HullOracle, Limits, SubsetMask};
use proptest::prelude::*;

/// Ground points whose hull contains every given set (lifted from `points`).
fn common_hull_points(space: &ConvexitySpace, points: &[usize], sets: &[SubsetMask]) -> SubsetMask {
    sets.iter()
        .fold(space.full(), |acc, s| acc & space.hull(&lift(points, s)))
}

fn space_and_points() -> impl Strategy<Value = (ConvexitySpace, Vec<usize>)> {
    space_strategy(8, 6).prop_flat_map(|space| {
        let n = space.n();
        (
            Just(space),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n.min(5)),
        )
    })
}

/// Convex sets: everything of size at most `j`, plus the ground set.
fn uniform_space(n: usize, j: usize) -> ConvexitySpace {
    let gens: Vec<SubsetMask> = all_subsets(n).filter(|s| s.len() <= j).collect();
    intersection_closure(&gens, n, 1 << 20).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_matches_hull_test(
        (space, points) in space_and_points(),
        raw in prop::collection::vec(prop::collection::vec(any::<u8>(), 1..=3), 1..=6),
    ) {
        let nv = compute_nerve_on(&space, &points, &Limits::default()).unwrap();
        let m = points.len();
        for gens in raw {
            let sets: Vec<SubsetMask> = gens
                .iter()
                .map(|b| SubsetMask::from_bits(u64::from(*b) & ((1 << m) - 1)))
                .filter(|s| !s.is_empty())
                .collect();
            if sets.is_empty() {
                continue;
            }
            let family = up_closure(&sets, m).unwrap();
            let expected = !common_hull_points(&space, &points, family.min_sets()).is_empty();
            prop_assert_eq!(nv.contains_family(&family), expected);
        }
        for f in nv.maximal_families() {
            prop_assert!(!common_hull_points(&space, &points, f.min_sets()).is_empty());
        }
    }

    #[test]
    fn nerve_roundtrip((space, points) in space_and_points()) {
        let limits = Limits::default();
        let nv = compute_nerve_on(&space, &points, &limits).unwrap();
        let ns = nerve_to_space(&nv, &limits).unwrap();
        prop_assert_eq!(&compute_nerve_on(&ns, ns.embedding(), &limits).unwrap(), &nv);
        let explicit = ns.materialize(&limits).unwrap();
        prop_assert_eq!(explicit.validate(), None);
        prop_assert_eq!(&compute_nerve_on(&explicit, ns.embedding(), &limits).unwrap(), &nv);
    }

    #[test]
    fn closed_form_hull_matches_materialized((space, points) in space_and_points()) {
        let limits = Limits::default();
        let nv = compute_nerve_on(&space, &points, &limits).unwrap();
        let ns = nerve_to_space(&nv, &limits).unwrap();
        let explicit = ns.materialize(&limits).unwrap();
        let y = ns.ground_size();
        if y > 10 {
            return Ok(());
        }
        for set in all_subsets(y) {
            prop_assert_eq!(ns.hull(&set), explicit.hull(&set));
        }
    }

    #[test]
    fn symmetric_reduction_agrees(n in 2usize..=6, j in 1usize..=3, r in 2usize..=4, t in 2usize..=3) {
        prop_assume!(t <= r);
        let space = uniform_space(n, j.min(n));
        let nv = compute_nerve(&space, &space.full(), &Limits::default()).unwrap();
        let group = PermutationGroup::symmetric(n);
        let plain = check_n5_abstract(&nv, r, t, None, &Limits::default()).unwrap();
        let reduced = check_n5_abstract(&nv, r, t, Some(&group), &Limits::default()).unwrap();
        prop_assert_eq!(plain.holds, reduced.holds);
        prop_assert_eq!(plain.distinct_holds, reduced.distinct_holds);
    }

    #[test]
    fn witness_revalidates(
        (space, points) in space_and_points(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 2..=4),
    ) {
        let limits = Limits::default();
        let nv = compute_nerve_on(&space, &points, &limits).unwrap();
        prop_assume!(!nv.is_empty());
        let families: Vec<UpFamily> = picks
            .iter()
            .map(|i| nv.maximal_families()[i.index(nv.len())].clone())
            .collect();
        match n5_witness(&space, &points, &families, 2) {
            Ok(w) => {
                let mut seen: Vec<usize> = w.groups.iter().flatten().copied().collect();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..families.len()).collect::<Vec<_>>());
                prop_assert_eq!(w.groups.len(), 2);
                prop_assert!(nv.contains_family(&w.merged));
                for s in w.merged.min_sets() {
                    prop_assert!(space.hull(&lift(&points, s)).contains(w.common_point));
                }
                // Membership in the merged family, decided directly.
                for a in all_subsets(points.len()).skip(1) {
                    let direct = w
                        .groups
                        .iter()
                        .any(|g| g.iter().all(|&i| families[i].contains(&a)));
                    prop_assert_eq!(w.merged.contains(&a), direct);
                }
            }
            Err(e) => prop_assert!(matches!(e, convexity::Error::PropertyViolation(_))),
        }
    }
}

#[test]
fn witness_exists_for_interval_triples() {
    let iv = make_example_space(&ExampleKind::Interval(7)).unwrap();
    let points: Vec<usize> = (0..5).collect();
    let nv = compute_nerve_on(&iv, &points, &Limits::default()).unwrap();
    let fams = nv.maximal_families();
    for a in 0..fams.len() {
        for b in 0..fams.len() {
            for c in 0..fams.len() {
                let chosen = [fams[a].clone(), fams[b].clone(), fams[c].clone()];
                n5_witness(&iv, &points, &chosen, 2).unwrap();
            }
        }
    }
}

#[test]
fn builtin_roundtrips() {
    let limits = Limits::default();
    for spec in ["interval:6", "singleton:6", "free:5", "box:2x3", "box:3x3"] {
        let space = make_example_space(&spec.parse::<ExampleKind>().unwrap()).unwrap();
        let nv = compute_nerve(&space, &space.full(), &limits).unwrap();
        let ns = nerve_to_space(&nv, &limits).unwrap();
        let back = compute_nerve_on(&ns, ns.embedding(), &limits).unwrap();
        assert_eq!(back, nv, "{spec}");
        assert_eq!(Nerve::from_json(&nv.to_json()).unwrap(), nv);
    }
}
