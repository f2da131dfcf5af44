mod common;

use common::*;
use convexity::bounds::{
    below_turan_threshold, check_kk_bound, count_r_bad, find_k_disjoint_common, is_r_good,
    jamison_disjoint_subsets, labeled_forests, shadow, text, turan_independent, Hypergraph,
    TupleFamily,
};
use convexity::mask::Combinations;
use convexity::radon::radon_number;
use convexity::space::make_example_space;
use convexity::{ExampleKind, HullOracle, Limits, SubsetMask};
use proptest::prelude::*;

/// Whether `r` coordinates can be picked pairwise disjoint, by trying every
/// `r`-subset of coordinates.
fn has_disjoint_coordinates(tuple: &[SubsetMask], r: usize) -> bool {
    if r > tuple.len() {
        return false;
    }
    Combinations::new(tuple.len(), r).any(|idx| {
        idx.iter().enumerate().all(|(i, &a)| {
            idx[i + 1..]
                .iter()
                .all(|&b| !tuple[a].intersects(&tuple[b]))
        })
    })
}

fn tuple_strategy() -> impl Strategy<Value = (Vec<SubsetMask>, usize)> {
    (1usize..=5, 1usize..=8).prop_flat_map(|(d, ground)| {
        let mask = (1u64 << ground) - 1;
        (
            prop::collection::vec(
                any::<u64>().prop_map(move |b| SubsetMask::from_bits(b & mask)),
                d,
            ),
            0usize..=d + 1,
        )
    })
}

fn family_strategy() -> impl Strategy<Value = TupleFamily> {
    (1usize..=3, 1usize..=3, 0usize..=4).prop_flat_map(|(d, r, extra)| {
        let ground = r + extra;
        let level: Vec<SubsetMask> = Combinations::new(ground, r)
            .map(SubsetMask::from_indices)
            .collect();
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(level), d),
            1..=20,
        )
        .prop_map(move |tuples| TupleFamily::new(d, r, ground, tuples).unwrap())
    })
}

/// Largest independent set size, by scanning all vertex subsets.
fn independence_number(h: &Hypergraph) -> usize {
    all_subsets(h.n())
        .filter(|s| h.edges().iter().all(|e| !e.is_subset(s)))
        .map(|s| s.len())
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn r_good_matches_disjointness_oracle((tuple, r) in tuple_strategy()) {
        prop_assert_eq!(is_r_good(&tuple, r), has_disjoint_coordinates(&tuple, r) || r == 0);
    }

    #[test]
    fn kk_bound_holds(family in family_strategy()) {
        let rep = check_kk_bound(&family).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn shadow_matches_definition(family in family_strategy()) {
        let sh = shadow(&family).unwrap();
        // A tuple is in the shadow iff each coordinate extends to the
        // matching coordinate of some member.
        let level: Vec<SubsetMask> = Combinations::new(family.ground_size(), family.r() - 1)
            .map(SubsetMask::from_indices)
            .collect();
        let mut expected = 0;
        let mut candidates: Vec<Vec<SubsetMask>> = vec![Vec::new()];
        for _ in 0..family.d() {
            candidates = candidates
                .into_iter()
                .flat_map(|c| level.iter().map(move |s| { let mut c = c.clone(); c.push(*s); c }))
                .collect();
        }
        for c in candidates {
            let inside = family
                .tuples()
                .any(|t| t.iter().zip(&c).all(|(big, small)| small.is_subset(big)));
            if inside {
                expected += 1;
                prop_assert!(sh.tuples().any(|u| *u == c));
            }
        }
        prop_assert_eq!(sh.len(), expected);
    }

    #[test]
    fn turan_finds_sets_below_threshold(n in 2usize..=9, bits in any::<u64>(), l in 1usize..=6) {
        let pairs: Vec<SubsetMask> = Combinations::new(n, 2).map(SubsetMask::from_indices).collect();
        let edges: Vec<SubsetMask> = pairs.iter().enumerate().filter(|(i, _)| bits >> (i % 64) & 1 == 1).map(|(_, e)| *e).collect();
        let h = Hypergraph::new(n, 2, edges).unwrap();
        let found = turan_independent(&h, l).unwrap();
        prop_assert_eq!(found.is_some(), independence_number(&h) >= l);
        if let Some(s) = found {
            prop_assert_eq!(s.len(), l);
            prop_assert!(h.is_independent(&s));
        }
        if below_turan_threshold(n, 2, h.edges().len(), l) {
            prop_assert!(found.is_some());
        }
    }
}

#[test]
fn full_family_shadow_is_full() {
    for d in 1..=2 {
        for r in 1..=3 {
            for ground in r..=6 {
                let full = TupleFamily::full(d, r, ground).unwrap();
                assert_eq!(
                    shadow(&full).unwrap(),
                    TupleFamily::full(d, r - 1, ground).unwrap()
                );
            }
        }
    }
}

#[test]
fn exact_r_bad_counts_match_oracle() {
    // Direct count over all ordered triples of 2-subsets of a 5-set.
    let level: Vec<SubsetMask> = Combinations::new(5, 2)
        .map(SubsetMask::from_indices)
        .collect();
    let mut bad = 0;
    for a in &level {
        for b in &level {
            for c in &level {
                if !has_disjoint_coordinates(&[*a, *b, *c], 2) {
                    bad += 1;
                }
            }
        }
    }
    let rep = count_r_bad(5, 2, 3, 2, 0, 0).unwrap();
    assert!(rep.exhaustive);
    assert_eq!(rep.bad, bad as f64);
    assert_eq!(rep.forests, labeled_forests(3));
}

#[test]
fn text_formats_roundtrip() {
    let f = text::parse_tuple_family("ground 6\n0 1 | 2 3\n# note\n1,4 | 0 5\n").unwrap();
    assert_eq!((f.d(), f.r(), f.len(), f.ground_size()), (2, 2, 2, 6));
    assert_eq!(
        text::parse_tuple_family(&text::format_tuple_family(&f)).unwrap(),
        f
    );
    let g = text::parse_hypergraph("0 1\n1 2\n").unwrap();
    assert_eq!((g.n(), g.s(), g.edges().len()), (3, 2, 2));
    assert!(text::parse_hypergraph("0 1\n0 1 2\n").is_err());
}

#[test]
fn disjoint_subsets_on_builtin_spaces() {
    let limits = Limits::default();
    for spec in ["interval:9", "singleton:9", "box:3x3", "box:4x4"] {
        let space = make_example_space(&spec.parse::<ExampleKind>().unwrap()).unwrap();
        let Some(r2) = radon_number(&space, 2, &limits).unwrap().value.attained() else {
            continue;
        };
        for t in 0..=2u32 {
            let need = r2.pow(t);
            if need > space.n() {
                continue;
            }
            for set in Combinations::new(space.n(), need)
                .take(40)
                .map(SubsetMask::from_indices)
            {
                let out = jamison_disjoint_subsets(&space, &set, t, &limits).unwrap();
                assert_eq!(out.sets.len(), 1 << t, "{spec}");
                assert!(out.is_valid_for(&space), "{spec}");
            }
        }
    }
}

#[test]
fn k_disjoint_sets_exist_at_radon_number() {
    let limits = Limits::default();
    for spec in ["interval:7", "singleton:7"] {
        let space = make_example_space(&spec.parse::<ExampleKind>().unwrap()).unwrap();
        for k in 2..=3 {
            let rk = radon_number(&space, k, &limits)
                .unwrap()
                .value
                .attained()
                .unwrap();
            for set in all_subsets(space.n()).filter(|s| s.len() >= rk) {
                let out = find_k_disjoint_common(&space, &set, k, &limits)
                    .unwrap()
                    .unwrap();
                assert_eq!(out.sets.len(), k);
                assert!(out.is_valid_for(&space));
                assert!(out
                    .sets
                    .iter()
                    .all(|s| space.hull(s).contains(out.common_point)));
            }
        }
    }
}
