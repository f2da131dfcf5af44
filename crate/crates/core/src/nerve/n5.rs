use rayon::prelude::*;
use serde::Serialize;

use super::family::{words_for, UpFamily};
use super::symmetry::PermutationGroup;
use super::{lift, Nerve};
use crate::error::{Error, Limits, Result};
use crate::mask::{binomial, set_partitions, SubsetMask};
use crate::radon::tverberg_partition;
use crate::space::HullOracle;

/// Families as contiguous bit vectors plus a member-to-family index, for
/// fast "is this family below some listed family" queries.
#[derive(Debug, Clone)]
pub struct NerveIndex {
    ground_size: usize,
    stride: usize,
    words: Vec<u64>,
    candidates: Vec<Vec<u32>>,
    levels: Vec<Vec<u64>>,
}

impl NerveIndex {
    pub fn new(ground_size: usize, families: &[UpFamily]) -> Self {
        let stride = words_for(ground_size);
        let lattice = 1usize << ground_size;
        let mut words = Vec::with_capacity(families.len() * stride);
        let mut candidates = vec![Vec::new(); lattice];
        for (i, f) in families.iter().enumerate() {
            let bits = f.to_bits();
            for s in 0..lattice {
                if bits.contains_index(s) {
                    candidates[s].push(i as u32);
                }
            }
            words.extend_from_slice(bits.words());
        }
        let mut levels = vec![vec![0u64; stride]; ground_size + 1];
        for s in 0..lattice {
            levels[s.count_ones() as usize][s / 64] |= 1 << (s % 64);
        }
        NerveIndex {
            ground_size,
            stride,
            words,
            candidates,
            levels,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn family_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Smallest index of a listed family containing the family `u`.
    pub fn find_container(&self, u: &[u64]) -> Option<usize> {
        // Any container holds a smallest member of `u`; scan only those.
        for level in &self.levels[1..] {
            for (w, (&a, &b)) in u.iter().zip(level).enumerate() {
                let hit = a & b;
                if hit != 0 {
                    let s = w * 64 + hit.trailing_zeros() as usize;
                    return self.candidates[s]
                        .iter()
                        .map(|&c| c as usize)
                        .find(|&c| words_subset(u, self.family_words(c)));
                }
            }
        }
        if u.iter().all(|&w| w == 0) && !self.is_empty() {
            return Some(0);
        }
        None
    }
}

#[inline]
fn words_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Result of an N5 check over multisets of maximal families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N5Outcome {
    pub holds: bool,
    /// First failing multiset (indices into the maximal families, sorted).
    pub failing: Option<Vec<usize>>,
    /// The same check restricted to sets of distinct families.
    pub distinct_holds: bool,
    pub distinct_failing: Option<Vec<usize>>,
    /// Size of the multiset enumeration that was scheduled.
    pub multisets: u128,
    pub symmetry_used: bool,
}

struct Checker<'a> {
    index: &'a NerveIndex,
    groupings: &'a [Vec<u32>],
    r: usize,
    distinct: bool,
    inter: Vec<u64>,
    union: Vec<u64>,
    chosen: Vec<usize>,
}

impl<'a> Checker<'a> {
    fn new(index: &'a NerveIndex, groupings: &'a [Vec<u32>], r: usize, distinct: bool) -> Self {
        let w = index.stride();
        let mut inter = vec![0u64; w << r];
        inter[..w].fill(u64::MAX);
        Checker {
            index,
            groupings,
            r,
            distinct,
            inter,
            union: vec![0; w],
            chosen: vec![0; r],
        }
    }

    // Intersections of every subset of positions 0..=d whose top position is d.
    fn place(&mut self, d: usize, fam: usize) {
        self.chosen[d] = fam;
        let w = self.index.stride();
        let f = self.index.family_words(fam);
        for mask in 0..1usize << d {
            let (lo, hi) = self.inter.split_at_mut((mask | 1 << d) * w);
            let src = &lo[mask * w..mask * w + w];
            for ((dst, s), x) in hi[..w].iter_mut().zip(src).zip(f) {
                *dst = s & x;
            }
        }
    }

    fn splits(&mut self) -> bool {
        let w = self.index.stride();
        for grouping in self.groupings {
            self.union.fill(0);
            for &block in grouping {
                let b = block as usize * w;
                for (u, x) in self.union.iter_mut().zip(&self.inter[b..b + w]) {
                    *u |= x;
                }
            }
            if self.index.find_container(&self.union).is_some() {
                return true;
            }
        }
        false
    }

    fn next_lo(&self, i: usize) -> usize {
        if self.distinct {
            i + 1
        } else {
            i
        }
    }

    fn descend(&mut self, d: usize, lo: usize, fixed: usize) -> bool {
        if d == self.r {
            return !self.splits();
        }
        for i in lo..self.index.len() {
            if self.distinct && self.chosen[..fixed].contains(&i) {
                continue;
            }
            self.place(d, i);
            if self.descend(d + 1, self.next_lo(i), fixed) {
                return true;
            }
        }
        false
    }

    /// Searches multisets extending `prefix` whose next free element is
    /// `first` (free elements nondecreasing). Returns a failing multiset.
    fn run(&mut self, prefix: &[usize], first: Option<usize>) -> Option<Vec<usize>> {
        if self.distinct {
            let mut seen = prefix.to_vec();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() < prefix.len() || first.is_some_and(|f| prefix.contains(&f)) {
                return None;
            }
        }
        for (d, &p) in prefix.iter().enumerate() {
            self.place(d, p);
        }
        let fixed = prefix.len();
        let failed = match first {
            Some(i) if fixed < self.r => {
                self.place(fixed, i);
                self.descend(fixed + 1, self.next_lo(i), fixed)
            }
            _ => self.descend(fixed, 0, fixed),
        };
        failed.then(|| {
            let mut out = self.chosen.clone();
            out.sort_unstable();
            out
        })
    }
}

fn multiset_count(m: usize, k: usize, distinct: bool) -> u128 {
    if distinct {
        binomial(m as u64, k as u64)
    } else {
        binomial((m + k).saturating_sub(1) as u64, k as u64)
    }
}

fn search(
    index: &NerveIndex,
    groupings: &[Vec<u32>],
    r: usize,
    distinct: bool,
    seeds: Option<&[(usize, usize)]>,
) -> Option<Vec<usize>> {
    match seeds {
        None => (0..index.len())
            .into_par_iter()
            .map_init(
                || Checker::new(index, groupings, r, distinct),
                |c, i| c.run(&[], Some(i)),
            )
            .find_map_first(|x| x),
        Some(pairs) => pairs
            .par_iter()
            .map_init(
                || Checker::new(index, groupings, r, distinct),
                |c, &(a, b)| c.run(&[a, b], None),
            )
            .find_map_first(|x| x),
    }
}

/// Representative pairs `(o1, o2)`: `o1` ranges over orbit representatives
/// of the family action, `o2` over representatives of the stabilizer of `o1`.
fn orbit_seeds(group: &PermutationGroup, nv: &Nerve) -> Result<Vec<(usize, usize)>> {
    let action = group.family_action(nv.maximal_families())?;
    let m = nv.len();
    let mut seeds = Vec::new();
    for o1 in super::symmetry::orbit_representatives(m, &action) {
        let stab = super::symmetry::stabilizer_generators(m, &action, o1);
        for o2 in super::symmetry::orbit_representatives(m, &stab) {
            seeds.push((o1, o2));
        }
    }
    Ok(seeds)
}

/// Checks N5 for `(r, t)`: every multiset of `r` maximal families splits into
/// `t` groups whose union of intersections lies below a maximal family.
pub fn check_n5_abstract(
    nv: &Nerve,
    r: usize,
    t: usize,
    symmetry: Option<&PermutationGroup>,
    limits: &Limits,
) -> Result<N5Outcome> {
    if t < 2 || r < t {
        return Err(Error::invalid(format!(
            "need r >= t >= 2, got r={r}, t={t}"
        )));
    }
    if r > 16 {
        return Err(Error::invalid(format!("r={r} is too large (at most 16)")));
    }
    limits.check_lattice(nv.ground_size())?;
    let m = nv.len();
    let index = NerveIndex::new(nv.ground_size(), nv.maximal_families());
    let groupings = set_partitions(r, t);
    let seeds = match symmetry {
        Some(g) => Some(orbit_seeds(g, nv)?),
        None => None,
    };
    let count = |distinct: bool| match &seeds {
        None => multiset_count(m, r, distinct),
        Some(p) => p.len() as u128 * multiset_count(m, r - 2, distinct),
    };
    let multisets = count(false);
    limits.charge("N5 multisets", multisets)?;

    let failing = search(&index, &groupings, r, false, seeds.as_deref());
    let distinct_failing = match &failing {
        None => None,
        Some(f) if f.windows(2).all(|w| w[0] != w[1]) => Some(f.clone()),
        Some(_) => {
            limits.charge("N5 distinct sets", count(true))?;
            search(&index, &groupings, r, true, seeds.as_deref())
        }
    };
    Ok(N5Outcome {
        holds: failing.is_none(),
        failing,
        distinct_holds: distinct_failing.is_none(),
        distinct_failing,
        multisets,
        symmetry_used: symmetry.is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRoute {
    /// Tverberg partition of the families' witness points.
    WitnessPartition,
    /// Direct search over groupings of the families.
    GroupingSearch,
}

/// A certified N5 grouping of concrete families over `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct N5Witness {
    /// Ground point in the hull of every member of each family.
    pub witnesses: Vec<usize>,
    /// Indices into the input families, one list per group.
    pub groups: Vec<Vec<usize>>,
    /// Union over groups of the intersection of the group's families.
    pub merged: UpFamily,
    /// Ground point in the hull of every member of `merged`.
    pub common_point: usize,
    pub route: WitnessRoute,
}

/// Points lying in the hull of every member of `family`.
fn hull_meet<H: HullOracle + ?Sized>(
    oracle: &H,
    points: &[usize],
    family: &UpFamily,
) -> SubsetMask {
    family
        .min_sets()
        .iter()
        .fold(SubsetMask::full(oracle.ground_size()), |acc, s| {
            acc & oracle.hull(&lift(points, s))
        })
}

fn merge(families: &[UpFamily], groups: &[Vec<usize>]) -> UpFamily {
    let g = families[0].ground_size();
    groups.iter().fold(UpFamily::empty(g), |acc, group| {
        let meet = group[1..].iter().fold(families[group[0]].clone(), |m, &i| {
            m.intersect(&families[i])
        });
        acc.union(&meet)
    })
}

/// Groups `families` (members of `Nv(P)`, `P` listed by `points`) into `t`
/// groups whose union of intersections is again in `Nv(P)`.
pub fn n5_witness<H: HullOracle + ?Sized>(
    oracle: &H,
    points: &[usize],
    families: &[UpFamily],
    t: usize,
) -> Result<N5Witness> {
    if t == 0 || families.len() < t {
        return Err(Error::invalid(format!(
            "cannot split {} families into {t} groups",
            families.len()
        )));
    }
    if let Some(f) = families.iter().find(|f| f.ground_size() != points.len()) {
        return Err(Error::invalid(format!(
            "family over {} points, P has {}",
            f.ground_size(),
            points.len()
        )));
    }
    let mut witnesses = Vec::with_capacity(families.len());
    for (i, f) in families.iter().enumerate() {
        match hull_meet(oracle, points, f).first() {
            Some(q) => witnesses.push(q),
            None => {
                return Err(Error::invalid(format!(
                    "family {i} has no common hull point, so it is not in Nv(P)"
                )))
            }
        }
    }
    let certify = |groups: Vec<Vec<usize>>, route| {
        let merged = merge(families, &groups);
        hull_meet(oracle, points, &merged)
            .first()
            .map(|x| N5Witness {
                witnesses: witnesses.clone(),
                groups,
                merged,
                common_point: x,
                route,
            })
    };

    let distinct: SubsetMask = witnesses.iter().copied().collect();
    if let Some(part) = tverberg_partition(oracle, &distinct, t) {
        let groups: Vec<Vec<usize>> = part
            .parts
            .iter()
            .map(|p| {
                (0..families.len())
                    .filter(|&i| p.contains(witnesses[i]))
                    .collect()
            })
            .collect();
        if let Some(w) = certify(groups, WitnessRoute::WitnessPartition) {
            return Ok(w);
        }
    }
    for grouping in set_partitions(families.len(), t) {
        let groups: Vec<Vec<usize>> = grouping
            .iter()
            .map(|&b| (0..families.len()).filter(|&i| b >> i & 1 == 1).collect())
            .collect();
        if let Some(w) = certify(groups, WitnessRoute::GroupingSearch) {
            return Ok(w);
        }
    }
    Err(Error::PropertyViolation(format!(
        "no grouping of {} families into {t} groups stays in Nv(P)",
        families.len()
    )))
}
