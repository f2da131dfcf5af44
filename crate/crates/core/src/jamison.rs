//! Spaces with `r_2 = 3`: the point families `F_p`, their three exchange
//! properties, the pair recursion giving `r_k <= 2k - 1`, and the
//! pair-hull selection count.

use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::mask::{binomial, SubsetMask};
use crate::nerve::{lift, point_families, up_closure, FamilyBits, UpFamily};
use crate::radon::{radon_number, RadonValue};
use crate::space::HullOracle;

/// For each point `p` of `P`, a nerve family `F_p` containing `{p}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamisonSystem {
    /// Ground indices of `P`; families use local indices into this list.
    pub points: Vec<usize>,
    pub families: Vec<UpFamily>,
    /// `witnesses[p]` is a ground point in the hull of every member of `F_p`.
    pub witnesses: Vec<usize>,
    pub construction: Construction,
    #[serde(skip)]
    bits: Vec<FamilyBits>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `F_p` is the maximal `F_x` with smallest `x` containing `{p}`.
    MaximalFamilies,
    /// `F_p` is generated by `{p}` and a searched set of pairs inside a
    /// maximal `F_x`; used when the maximal choice breaks J3.
    PairSearch,
}

/// A violated exchange property, in local indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum JViolation {
    /// `{p} ∉ F_p`.
    J1 { p: usize },
    /// None of `{p,q} ∈ F_r`, `{p,r} ∈ F_q`, `{q,r} ∈ F_p`.
    J2 { p: usize, q: usize, r: usize },
    /// `{q,r} ∈ F_p` and `{r,s} ∈ F_q` but `{r,s} ∉ F_p`.
    J3 {
        p: usize,
        q: usize,
        r: usize,
        s: usize,
    },
}

fn pair(a: usize, b: usize) -> usize {
    1 << a | 1 << b
}

impl JamisonSystem {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Local subset `s` (as bits) lies in `F_p`.
    fn has(&self, p: usize, s: usize) -> bool {
        self.bits[p].contains_index(s)
    }

    /// First violation of J1, J2 or J3, scanning in lexicographic order.
    pub fn violation(&self) -> Option<JViolation> {
        let n = self.len();
        if let Some(p) = (0..n).find(|&p| !self.has(p, 1 << p)) {
            return Some(JViolation::J1 { p });
        }
        for p in 0..n {
            for q in p + 1..n {
                for r in q + 1..n {
                    if !(self.has(r, pair(p, q))
                        || self.has(q, pair(p, r))
                        || self.has(p, pair(q, r)))
                    {
                        return Some(JViolation::J2 { p, q, r });
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in (0..n).filter(|&r| r != q) {
                    if !self.has(p, pair(q, r)) {
                        continue;
                    }
                    for s in (0..n).filter(|&s| s != r) {
                        if self.has(q, pair(r, s)) && !self.has(p, pair(r, s)) {
                            return Some(JViolation::J3 { p, q, r, s });
                        }
                    }
                }
            }
        }
        None
    }
}

/// Builds `F_p` for every `p ∈ P` satisfying J1 to J3. The first choice is
/// the maximal `F_x` with smallest `x` containing `{p}`; when that breaks an
/// exchange property, `F_p` is searched among families generated by `{p}`
/// and pairs of a maximal `F_x` (only singletons and pairs enter J1 to J3).
/// Fails unless `r_2 <= 3`.
pub fn build_jamison_system<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
    limits: &Limits,
) -> Result<JamisonSystem> {
    match radon_number(oracle, 2, limits)?.value {
        RadonValue::Attained(v) if v <= 3 => {}
        other => {
            return Err(Error::invalid(format!(
                "space has r_2 = {other}, expected 3"
            )))
        }
    }
    let points = set.to_vec();
    let fams = point_families(oracle, &points, limits)?;
    let maximal: Vec<bool> = fams
        .iter()
        .map(|f| !fams.iter().any(|g| g != f && f.is_subset(g)))
        .collect();
    let m = points.len();
    // Distinct maximal families holding {p}, by smallest witness.
    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|p| {
            let mut xs: Vec<usize> = Vec::new();
            for x in 0..fams.len() {
                if maximal[x]
                    && fams[x].contains_index(1 << p)
                    && !xs.iter().any(|&y| fams[y] == fams[x])
                {
                    xs.push(x);
                }
            }
            xs
        })
        .collect();
    let witnesses: Vec<usize> = candidates.iter().map(|xs| xs[0]).collect();
    let bits: Vec<FamilyBits> = witnesses.iter().map(|&x| fams[x].clone()).collect();
    let system = JamisonSystem {
        families: bits.iter().map(FamilyBits::to_family).collect(),
        points,
        witnesses,
        construction: Construction::MaximalFamilies,
        bits,
    };
    let Some(first) = system.violation() else {
        return Ok(system);
    };
    let Some((witnesses, pairs)) = PairSearch::new(m, &fams, &candidates, limits).run()? else {
        return Err(Error::PropertyViolation(format!(
            "no families satisfy the exchange properties (maximal choice fails with {})",
            serde_json::to_string(&first).expect("violation serializes")
        )));
    };
    let families: Vec<UpFamily> = (0..m)
        .map(|p| {
            let mut gens = vec![SubsetMask::singleton(p)];
            gens.extend(
                (0..m)
                    .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                    .filter(|&(a, b)| pairs[p] >> pair_index(m, a, b) & 1 == 1)
                    .map(|(a, b)| SubsetMask::from_indices([a, b])),
            );
            up_closure(&gens, m).expect("pairs fit P")
        })
        .collect();
    let system = JamisonSystem {
        bits: families.iter().map(UpFamily::to_bits).collect(),
        families,
        points: system.points,
        witnesses,
        construction: Construction::PairSearch,
    };
    if let Some(v) = system.violation() {
        return Err(Error::PropertyViolation(format!(
            "searched families fail {}",
            serde_json::to_string(&v).expect("violation serializes")
        )));
    }
    Ok(system)
}

fn pair_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

/// Backtracking over J2 choices with J3 applied as a closure rule.
/// `pairs[p]` holds the pairs (by [`pair_index`]) in `F_p`; a pair may only
/// enter `F_p` when it lies in the chosen `F_x`.
struct PairSearch<'a> {
    m: usize,
    fams: &'a [FamilyBits],
    candidates: &'a [Vec<usize>],
    limits: &'a Limits,
    nodes: u128,
}

impl<'a> PairSearch<'a> {
    fn new(
        m: usize,
        fams: &'a [FamilyBits],
        candidates: &'a [Vec<usize>],
        limits: &'a Limits,
    ) -> Self {
        PairSearch {
            m,
            fams,
            candidates,
            limits,
            nodes: 0,
        }
    }

    fn run(&mut self) -> Result<Option<(Vec<usize>, Vec<u128>)>> {
        let m = self.m;
        if m * (m - 1) / 2 > 128 {
            return Err(Error::ResourceLimit {
                what: "pairs of P in the exchange search",
                needed: (m * (m - 1) / 2) as u128,
                cap: 128,
            });
        }
        let mut choice = vec![0usize; m];
        loop {
            let witnesses: Vec<usize> = (0..m).map(|p| self.candidates[p][choice[p]]).collect();
            let allowed: Vec<u128> = witnesses
                .iter()
                .map(|&x| {
                    let mut bits = 0u128;
                    for a in 0..m {
                        for b in a + 1..m {
                            if self.fams[x].contains_index(1 << a | 1 << b) {
                                bits |= 1 << pair_index(m, a, b);
                            }
                        }
                    }
                    bits
                })
                .collect();
            let own: Vec<u128> = (0..m)
                .map(|p| {
                    (0..m)
                        .filter(|&q| q != p)
                        .fold(0, |acc, q| acc | 1 << pair_index(m, p, q))
                })
                .collect();
            if let Some(pairs) = self.close(own, &allowed) {
                if let Some(found) = self.descend(pairs, &allowed, 0, 1, 2)? {
                    return Ok(Some((witnesses, found)));
                }
            }
            // Next witness choice, odometer style.
            let mut i = 0;
            loop {
                if i == m {
                    return Ok(None);
                }
                choice[i] += 1;
                if choice[i] < self.candidates[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Closes `pairs` under J3; `None` if a forbidden pair is forced.
    fn close(&self, mut pairs: Vec<u128>, allowed: &[u128]) -> Option<Vec<u128>> {
        let m = self.m;
        loop {
            let mut changed = false;
            for p in 0..m {
                for q in 0..m {
                    for r in (0..m).filter(|&r| r != q) {
                        if pairs[p] >> pair_index(m, q, r) & 1 == 0 {
                            continue;
                        }
                        for s in (0..m).filter(|&s| s != r && s != q) {
                            let rs = 1u128 << pair_index(m, r, s);
                            if pairs[q] & rs != 0 && pairs[p] & rs == 0 {
                                pairs[p] |= rs;
                                changed = true;
                            }
                        }
                    }
                }
                if pairs[p] & !allowed[p] != 0 {
                    return None;
                }
            }
            if !changed {
                return Some(pairs);
            }
        }
    }

    /// Satisfies the J2 clauses from triple `(p, q, r)` on, in lexicographic order.
    fn descend(
        &mut self,
        pairs: Vec<u128>,
        allowed: &[u128],
        p: usize,
        q: usize,
        r: usize,
    ) -> Result<Option<Vec<u128>>> {
        let m = self.m;
        self.nodes += 1;
        self.limits
            .charge("exchange-property search nodes", self.nodes)?;
        let (mut p, mut q, mut r) = (p, q, r);
        loop {
            if p + 2 >= m {
                return Ok(Some(pairs));
            }
            let options = [
                (r, pair_index(m, p, q)),
                (q, pair_index(m, p, r)),
                (p, pair_index(m, q, r)),
            ];
            let (np, nq, nr) = next_triple(m, p, q, r);
            if options.iter().any(|&(f, i)| pairs[f] >> i & 1 == 1) {
                (p, q, r) = (np, nq, nr);
                continue;
            }
            for (f, i) in options {
                if allowed[f] >> i & 1 == 0 {
                    continue;
                }
                let mut next = pairs.clone();
                next[f] |= 1 << i;
                if let Some(closed) = self.close(next, allowed) {
                    if let Some(done) = self.descend(closed, allowed, np, nq, nr)? {
                        return Ok(Some(done));
                    }
                }
            }
            return Ok(None);
        }
    }
}

/// Lexicographic successor of `p < q < r`; runs past the end as `p = m`.
fn next_triple(m: usize, p: usize, q: usize, r: usize) -> (usize, usize, usize) {
    if r + 1 < m {
        (p, q, r + 1)
    } else if q + 2 < m {
        (p, q + 1, q + 2)
    } else {
        (p + 1, p + 2, p + 3)
    }
}

/// `k` disjoint sets covering `P` that all lie in one family `F_r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamisonPartition {
    /// Parts as ground-index masks, in the order they were found.
    pub parts: Vec<SubsetMask>,
    /// Ground index of the point `r` whose family holds every part.
    pub family_point: usize,
    /// Ground point in the hull of every part.
    pub witness: usize,
}

impl JamisonPartition {
    /// Re-checks disjointness, cover and the common hull point.
    pub fn is_valid_for<H: HullOracle + ?Sized>(&self, oracle: &H, set: &SubsetMask) -> bool {
        let mut union = SubsetMask::empty();
        for part in &self.parts {
            if part.is_empty()
                || part.intersects(&union)
                || !oracle.hull(part).contains(self.witness)
            {
                return false;
            }
            union |= *part;
        }
        union == *set
    }
}

/// Splits `set` into `k` parts by repeatedly removing the first pair
/// `{p,q}` (lexicographic) lying in `F_r` for every other remaining `r`.
pub fn jamison_tverberg<H: HullOracle + ?Sized>(
    oracle: &H,
    system: &JamisonSystem,
    set: &SubsetMask,
    k: usize,
) -> Result<JamisonPartition> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut local = Vec::new();
    for g in set.iter() {
        match system.points.iter().position(|&p| p == g) {
            Some(i) => local.push(i),
            None => return Err(Error::invalid(format!("point {g} is not in the system"))),
        }
    }
    if local.len() < 2 * (k - 1) + 1 {
        return Err(Error::invalid(format!(
            "|P| = {} is below 2(k-1)+1 = {}",
            local.len(),
            2 * (k - 1) + 1
        )));
    }
    let mut remaining = local;
    let mut pairs: Vec<usize> = Vec::new();
    for _ in 1..k {
        let found = remaining.iter().enumerate().find_map(|(i, &p)| {
            remaining[i + 1..].iter().find_map(|&q| {
                let s = pair(p, q);
                remaining
                    .iter()
                    .all(|&r| r == p || r == q || system.has(r, s))
                    .then_some((p, q))
            })
        });
        let Some((p, q)) = found else {
            return Err(Error::PropertyViolation(format!(
                "no pair lies in F_r for every other r of {:?}",
                remaining
                    .iter()
                    .map(|&i| system.points[i])
                    .collect::<Vec<_>>()
            )));
        };
        remaining.retain(|&r| r != p && r != q);
        pairs.push(pair(p, q));
    }
    let rest: usize = remaining.iter().fold(0, |acc, &i| acc | 1 << i);
    let r = remaining[0];
    let mut local_parts = pairs;
    local_parts.push(rest);
    if let Some(&bad) = local_parts.iter().find(|&&s| !system.has(r, s)) {
        return Err(Error::PropertyViolation(format!(
            "part {:?} is not in F_{}",
            lift(&system.points, &SubsetMask::from_bits(bad as u64)).to_vec(),
            system.points[r]
        )));
    }
    let parts: Vec<SubsetMask> = local_parts
        .iter()
        .map(|&s| lift(&system.points, &SubsetMask::from_bits(s as u64)))
        .collect();
    let out = JamisonPartition {
        parts,
        family_point: system.points[r],
        witness: system.witnesses[r],
    };
    if !out.is_valid_for(oracle, set) {
        return Err(Error::PropertyViolation(format!(
            "parts {:?} fail the hull check at {}",
            out.parts, out.witness
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionStatistic {
    pub n: usize,
    /// Smallest ground point attaining the maximum.
    pub point: usize,
    /// Number of pairs `{q,r} ⊆ P` with `point ∈ hull{q,r}`.
    pub count: u128,
    /// `C(n,3)`; the guaranteed bound is `count >= C(n,3)/n`.
    pub triples: u128,
    pub meets_bound: bool,
    /// `count / C(n,2)`.
    pub pair_fraction: f64,
}

/// Largest number of pair hulls of `P` sharing one ground point.
pub fn selection_statistic<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
) -> Result<SelectionStatistic> {
    let n = set.len();
    if n < 3 {
        return Err(Error::invalid(format!("need |P| >= 3, got {n}")));
    }
    let pts = set.to_vec();
    let mut counts = vec![0u128; oracle.ground_size()];
    for (i, &q) in pts.iter().enumerate() {
        for &r in &pts[i + 1..] {
            for x in oracle.hull(&SubsetMask::from_indices([q, r])).iter() {
                counts[x] += 1;
            }
        }
    }
    let count = *counts.iter().max().expect("non-empty ground set");
    let point = counts.iter().position(|&c| c == count).expect("max exists");
    let triples = binomial(n as u64, 3);
    Ok(SelectionStatistic {
        n,
        point,
        count,
        triples,
        meets_bound: count * n as u128 >= triples,
        pair_fraction: count as f64 / binomial(n as u64, 2) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::up_closure;
    use crate::space::{make_example_space, ExampleKind};

    fn m(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix.iter().copied())
    }

    #[test]
    fn interval_three_middle_family() {
        let iv = make_example_space(&ExampleKind::Interval(3)).unwrap();
        let sys = build_jamison_system(&iv, &m(&[0, 1, 2]), &Limits::default()).unwrap();
        assert!(sys.families[1].contains(&m(&[0, 2])));
    }

    #[test]
    fn singleton_families_hold_pairs_avoiding_p() {
        let sg = make_example_space(&ExampleKind::Singleton(5)).unwrap();
        let sys = build_jamison_system(&sg, &SubsetMask::full(5), &Limits::default()).unwrap();
        for p in 0..5 {
            let mut gens = vec![m(&[p])];
            for a in 0..5 {
                for b in a + 1..5 {
                    if a != p && b != p {
                        gens.push(m(&[a, b]));
                    }
                }
            }
            assert_eq!(sys.families[p], up_closure(&gens, 5).unwrap());
        }
    }

    #[test]
    fn rejects_spaces_without_r2_three() {
        let free = make_example_space(&ExampleKind::Free(3)).unwrap();
        assert!(build_jamison_system(&free, &SubsetMask::full(3), &Limits::default()).is_err());
    }

    #[test]
    fn tverberg_base_cases() {
        let iv = make_example_space(&ExampleKind::Interval(5)).unwrap();
        let sys = build_jamison_system(&iv, &SubsetMask::full(5), &Limits::default()).unwrap();
        let p = m(&[0, 1, 2]);
        let out = jamison_tverberg(&iv, &sys, &p, 2).unwrap();
        assert_eq!(out.parts, vec![m(&[0, 2]), m(&[1])]);
        assert_eq!(out.family_point, 1);
        assert!(out.is_valid_for(&iv, &p));
        let one = jamison_tverberg(&iv, &sys, &p, 1).unwrap();
        assert_eq!(one.parts, vec![p]);
        assert!(jamison_tverberg(&iv, &sys, &m(&[0, 1]), 2).is_err());
    }

    #[test]
    fn singleton_five_points_three_parts() {
        let sg = make_example_space(&ExampleKind::Singleton(5)).unwrap();
        let all = SubsetMask::full(5);
        let sys = build_jamison_system(&sg, &all, &Limits::default()).unwrap();
        let out = jamison_tverberg(&sg, &sys, &all, 3).unwrap();
        assert_eq!(out.parts, vec![m(&[0, 1]), m(&[2, 3]), m(&[4])]);
        assert_eq!(out.family_point, 4);
        assert!(out.is_valid_for(&sg, &all));
    }

    #[test]
    fn selection_on_interval_seven() {
        let iv = make_example_space(&ExampleKind::Interval(7)).unwrap();
        let s = selection_statistic(&iv, &SubsetMask::full(7)).unwrap();
        // Oracle: pairs q < 3 < r plus pairs with 3 as an endpoint.
        let straddling = 3 * 3;
        let through = 6;
        assert_eq!((s.point, s.count), (3, straddling + through));
        assert!(s.meets_bound && s.count * 7 >= 35);
    }
}
