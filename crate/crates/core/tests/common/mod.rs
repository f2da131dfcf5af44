#![allow(dead_code)]

use convexity::space::intersection_closure;
use convexity::{ConvexitySpace, HullOracle, SubsetMask};
use proptest::prelude::*;

pub fn m(ix: &[usize]) -> SubsetMask {
    SubsetMask::from_indices(ix.iter().copied())
}

/// Space on `0..n` generated by the given bit patterns.
pub fn closure_of(n: usize, gens: &[u64]) -> ConvexitySpace {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let gens: Vec<SubsetMask> = gens
        .iter()
        .map(|g| SubsetMask::from_bits(g & mask))
        .collect();
    intersection_closure(&gens, n, 1 << 20).unwrap()
}

pub fn space_strategy(max_n: usize, max_gens: usize) -> impl Strategy<Value = ConvexitySpace> {
    (1..=max_n, prop::collection::vec(any::<u64>(), 0..=max_gens))
        .prop_map(|(n, gens)| closure_of(n, &gens))
}

/// Smallest convex superset, found by size rather than by intersecting.
pub fn smallest_convex_superset(space: &ConvexitySpace, set: &SubsetMask) -> SubsetMask {
    *space
        .convex_sets()
        .iter()
        .filter(|c| set.is_subset(c))
        .min_by_key(|c| c.len())
        .unwrap()
}

/// Whether some labelling of `set` by `0..k`, every label used, has hulls
/// with a common point.
pub fn partitionable_by_labelling<H: HullOracle>(oracle: &H, set: &SubsetMask, k: usize) -> bool {
    let pts = set.to_vec();
    if pts.len() < k || k == 0 {
        return false;
    }
    let total = k.pow(pts.len() as u32);
    (0..total).any(|code| {
        let mut parts = vec![SubsetMask::empty(); k];
        let mut c = code;
        for &p in &pts {
            parts[c % k].insert(p);
            c /= k;
        }
        if parts.iter().any(|p| p.is_empty()) {
            return false;
        }
        let meet = parts
            .iter()
            .fold(SubsetMask::full(oracle.ground_size()), |acc, p| {
                acc & oracle.hull(p)
            });
        !meet.is_empty()
    })
}

/// Smallest `m` such that every `m`-subset is partitionable into `k` parts.
pub fn radon_number_by_labelling<H: HullOracle>(oracle: &H, k: usize) -> Option<usize> {
    let n = oracle.ground_size();
    let all_split = |size: usize| {
        (0u64..1 << n)
            .filter(|b| b.count_ones() as usize == size)
            .all(|b| partitionable_by_labelling(oracle, &SubsetMask::from_bits(b), k))
    };
    (1..=n).find(|&size| all_split(size))
}

/// All subsets of `0..n` as masks.
pub fn all_subsets(n: usize) -> impl Iterator<Item = SubsetMask> {
    (0u64..1 << n).map(SubsetMask::from_bits)
}
