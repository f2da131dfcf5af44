mod common;

use common::*;
use convexity::jamison::{
    build_jamison_system, jamison_tverberg, selection_statistic, Construction,
};
use convexity::mask::binomial;
use convexity::radon::radon_number;
use convexity::space::{make_example_space, random_space};
use convexity::{ConvexitySpace, ExampleKind, HullOracle, Limits, SubsetMask};

/// Builtin and seeded random spaces on at most 9 points with `r_2 = 3`.
fn r3_spaces() -> Vec<(String, ConvexitySpace)> {
    let mut out = Vec::new();
    for n in 3..=9 {
        for kind in [ExampleKind::Interval(n), ExampleKind::Singleton(n)] {
            out.push((kind.to_string(), make_example_space(&kind).unwrap()));
        }
    }
    for seed in 0..200 {
        let n = 4 + (seed as usize % 5);
        let space = random_space(n, 2 + seed as usize % 6, seed).unwrap();
        if radon_number(&space, 2, &Limits::default())
            .unwrap()
            .value
            .attained()
            == Some(3)
        {
            out.push((format!("random n={n} seed={seed}"), space));
        }
    }
    out
}

#[test]
fn exchange_properties_by_hull() {
    let spaces = r3_spaces();
    assert!(
        spaces.len() > 14,
        "random spaces with r_2 = 3 were generated"
    );
    let mut searched = 0;
    for (name, space) in &spaces {
        let set = space.full();
        let sys = build_jamison_system(space, &set, &Limits::default()).unwrap();
        assert_eq!(sys.violation(), None, "{name}");
        let pts = &sys.points;
        let n = pts.len();
        let hull_has = |p: usize, a: usize, b: usize| {
            space
                .hull(&SubsetMask::from_indices([pts[a], pts[b]]))
                .contains(sys.witnesses[p])
        };
        let has = |p: usize, a: usize, b: usize| {
            sys.families[p].contains(&SubsetMask::from_indices([a, b]))
        };
        for p in 0..n {
            assert!(
                sys.families[p].contains(&SubsetMask::singleton(p)),
                "{name} J1"
            );
            assert!(
                space
                    .hull(&SubsetMask::singleton(pts[p]))
                    .contains(sys.witnesses[p]),
                "{name} J1"
            );
            // Every pair in F_p has the witness in its hull; maximal
            // families hold exactly those pairs.
            for a in 0..n {
                for b in a + 1..n {
                    if has(p, a, b) {
                        assert!(hull_has(p, a, b), "{name} witness");
                    } else if sys.construction == Construction::MaximalFamilies {
                        assert!(!hull_has(p, a, b), "{name} maximal");
                    }
                }
            }
            for q in 0..n {
                for r in 0..n {
                    if p != q && q != r && p != r {
                        assert!(has(r, p, q) || has(q, p, r) || has(p, q, r), "{name} J2");
                    }
                    if q == r || !has(p, q, r) {
                        continue;
                    }
                    for s in (0..n).filter(|&s| s != r) {
                        assert!(!has(q, r, s) || has(p, r, s), "{name} J3 {p} {q} {r} {s}");
                    }
                }
            }
        }
        searched += usize::from(sys.construction == Construction::PairSearch);
    }
    assert!(searched > 0, "some space needs the pair search");
}

/// n = 6 space where no choice of maximal families satisfies J3.
#[test]
fn maximal_families_can_break_the_third_property() {
    let space = closure_of(6, &[0b001001, 0b110100]);
    let sys = build_jamison_system(&space, &space.full(), &Limits::default()).unwrap();
    assert_eq!(sys.construction, Construction::PairSearch);
    assert_eq!(sys.violation(), None);
}

#[test]
fn tverberg_parts_on_every_small_set() {
    let limits = Limits::default();
    for (name, space) in r3_spaces() {
        let n = space.n();
        for k in 2..=4 {
            let size = 2 * (k - 1) + 1;
            if size > n {
                continue;
            }
            for set in all_subsets(n).filter(|s| s.len() == size) {
                let sys = build_jamison_system(&space, &set, &limits).unwrap();
                let part = jamison_tverberg(&space, &sys, &set, k).unwrap();
                assert_eq!(part.parts.len(), k, "{name}");
                let mut union = SubsetMask::empty();
                for p in &part.parts {
                    assert!(!p.is_empty() && !p.intersects(&union) && p.is_subset(&set));
                    union |= *p;
                    assert!(space.hull(p).contains(part.witness), "{name}");
                }
                assert_eq!(union, set);
            }
        }
    }
}

#[test]
fn selection_count_meets_bound() {
    for (name, space) in r3_spaces() {
        let stat = selection_statistic(&space, &space.full()).unwrap();
        // Direct count of pairs whose hull holds the reported point.
        let n = space.n();
        let mut count = 0u128;
        for a in 0..n {
            for b in a + 1..n {
                if space
                    .hull(&SubsetMask::from_indices([a, b]))
                    .contains(stat.point)
                {
                    count += 1;
                }
            }
        }
        assert_eq!(stat.count, count, "{name}");
        assert!(count * n as u128 >= binomial(n as u64, 3), "{name}");
        assert!(stat.meets_bound);
    }
}

#[test]
fn rejects_spaces_with_larger_radon_number() {
    let boxed = make_example_space(&ExampleKind::BoxProduct(vec![3, 3])).unwrap();
    assert!(build_jamison_system(&boxed, &boxed.full(), &Limits::default()).is_err());
}
