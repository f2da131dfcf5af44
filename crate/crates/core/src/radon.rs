//! Exact Tverberg-partition search, Radon numbers, and brute-force explorers
//! (centrepoints, weak ε-nets) on finite spaces.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Limits, Result};
use crate::mask::{binomial, find_in_combinations_from, SubsetMask};
use crate::space::{ConvexitySpace, HullOracle};

/// A partition of a point set into non-empty parts whose hulls share `witness`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TverbergPartition {
    pub parts: Vec<SubsetMask>,
    pub witness: usize,
}

impl TverbergPartition {
    /// Re-checks the partition from scratch using only `hull`.
    pub fn is_valid_for<H: HullOracle + ?Sized>(&self, oracle: &H, set: &SubsetMask) -> bool {
        let mut union = SubsetMask::empty();
        for part in &self.parts {
            if part.is_empty() || part.intersects(&union) {
                return false;
            }
            union |= *part;
            if !oracle.hull(part).contains(self.witness) {
                return false;
            }
        }
        union == *set
    }
}

/// Reusable buffers for the restricted-growth partition search.
struct PartitionSearch {
    points: Vec<usize>,
    parts: Vec<SubsetMask>,
}

impl PartitionSearch {
    fn new() -> Self {
        PartitionSearch {
            points: Vec::new(),
            parts: Vec::new(),
        }
    }

    fn run<H: HullOracle + ?Sized>(
        &mut self,
        oracle: &H,
        set: &SubsetMask,
        k: usize,
    ) -> Option<TverbergPartition> {
        self.points.clear();
        self.points.extend(set.iter());
        if k == 0 || k > self.points.len() {
            return None;
        }
        self.parts.clear();
        self.parts.resize(k, SubsetMask::empty());
        let witness = self.assign(oracle, 0, 0)?;
        Some(TverbergPartition {
            parts: self.parts.clone(),
            witness,
        })
    }

    // Parts are opened in order of their smallest point, so each unordered
    // partition is visited exactly once.
    fn assign<H: HullOracle + ?Sized>(
        &mut self,
        oracle: &H,
        i: usize,
        used: usize,
    ) -> Option<usize> {
        let k = self.parts.len();
        if self.points.len() - i < k - used {
            return None;
        }
        if i == self.points.len() {
            return oracle.common_point(&self.parts);
        }
        let p = self.points[i];
        for b in 0..used {
            self.parts[b].insert(p);
            if let Some(w) = self.assign(oracle, i + 1, used) {
                return Some(w);
            }
            self.parts[b].remove(p);
        }
        if used < k {
            self.parts[used].insert(p);
            if let Some(w) = self.assign(oracle, i + 1, used + 1) {
                return Some(w);
            }
            self.parts[used].remove(p);
        }
        None
    }
}

/// First Tverberg partition of `set` into `k` non-empty parts, or `None` if
/// none exists. The search is exhaustive.
pub fn tverberg_partition<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
    k: usize,
) -> Option<TverbergPartition> {
    PartitionSearch::new().run(oracle, set, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadonValue {
    Attained(usize),
    NotAttained,
}

impl std::fmt::Display for RadonValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RadonValue::Attained(v) => write!(f, "{v}"),
            RadonValue::NotAttained => write!(f, "not attained"),
        }
    }
}

impl RadonValue {
    pub fn attained(self) -> Option<usize> {
        match self {
            RadonValue::Attained(v) => Some(v),
            RadonValue::NotAttained => None,
        }
    }
}

impl Serialize for RadonValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RadonValue::Attained(v) => s.serialize_u64(*v as u64),
            RadonValue::NotAttained => s.serialize_str("not attained"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RadonNumberResult {
    pub k: usize,
    pub value: RadonValue,
    /// A largest set admitting no `k`-partition.
    pub certificate: SubsetMask,
}

/// First `size`-subset (lexicographic) with no Tverberg `k`-partition.
pub fn first_unpartitionable<H: HullOracle + ?Sized>(
    oracle: &H,
    size: usize,
    k: usize,
) -> Option<SubsetMask> {
    let n = oracle.ground_size();
    if size > n {
        return None;
    }
    if size == 0 {
        return (k > 0).then(SubsetMask::empty);
    }
    (0..=n - size).into_par_iter().find_map_first(|first| {
        let mut search = PartitionSearch::new();
        find_in_combinations_from(n, size, first, |_, mask| {
            search.run(oracle, &mask, k).is_none().then_some(mask)
        })
    })
}

/// The `k`-th Radon number by exhaustive subset scan.
///
/// Sizes are scanned upward from `k`; by monotonicity (adding a point to any
/// part keeps a partition valid) the first size at which every subset splits
/// is `r_k`, and the last failure found is a largest non-splitting set. If
/// the ground set itself does not split, the value is not attained.
pub fn radon_number<H: HullOracle + ?Sized>(
    oracle: &H,
    k: usize,
    limits: &Limits,
) -> Result<RadonNumberResult> {
    if k == 0 {
        return Err(Error::invalid("radon_number needs k >= 1"));
    }
    let n = oracle.ground_size();
    let mut certificate = SubsetMask::from_indices(0..(k - 1).min(n));
    let mut scanned: u128 = 0;
    for size in k..=n {
        scanned = scanned.saturating_add(binomial(n as u64, size as u64));
        limits.charge("radon_number subset scan", scanned)?;
        match first_unpartitionable(oracle, size, k) {
            None => {
                return Ok(RadonNumberResult {
                    k,
                    value: RadonValue::Attained(size),
                    certificate,
                })
            }
            Some(bad) => certificate = bad,
        }
    }
    Ok(RadonNumberResult {
        k,
        value: RadonValue::NotAttained,
        certificate: SubsetMask::full(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Holds,
    Fails,
    NotApplicable,
}

impl CheckStatus {
    fn of(lhs: Option<usize>, rhs: Option<usize>) -> Self {
        match (lhs, rhs) {
            (Some(l), Some(r)) if l <= r => CheckStatus::Holds,
            (Some(_), Some(_)) => CheckStatus::Fails,
            _ => CheckStatus::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    /// Human-readable statement, e.g. `r_4 <= r_2 * r_2`.
    pub statement: String,
    pub lhs: Option<usize>,
    pub rhs: Option<usize>,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    pub r2: usize,
    /// `values[k-1]` is `r_k` for `k = 1..=k_max`.
    pub values: Vec<RadonValue>,
    pub product_bound: Vec<InequalityCheck>,
    pub doubling_recurrence: Vec<InequalityCheck>,
    pub conjectured_bound: Vec<InequalityCheck>,
    pub power_bound: Vec<InequalityCheck>,
    /// Recurrence instances skipped because they would need `r_1`.
    pub skipped: Vec<String>,
}

impl RecurrenceReport {
    pub fn all_checks(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.product_bound
            .iter()
            .chain(&self.doubling_recurrence)
            .chain(&self.conjectured_bound)
            .chain(&self.power_bound)
    }

    pub fn any_failure(&self) -> bool {
        self.all_checks().any(|c| c.status == CheckStatus::Fails)
    }
}

/// Exact `r_1..r_kmax` plus the classical bounds relating them:
/// `r_{ab} <= r_a r_b`, `r_{2k+1} <= (r_2-1)(r_{k+1}-1) + r_k + 1`, the
/// conjectured `r_k <= (k-1)(r_2-1) + 1`, and `r_k <= k^ceil(log2 r_2)`.
pub fn check_recurrences<H: HullOracle + ?Sized>(
    oracle: &H,
    k_max: usize,
    limits: &Limits,
) -> Result<RecurrenceReport> {
    if k_max < 2 {
        return Err(Error::invalid("check_recurrences needs k_max >= 2"));
    }
    let values = (1..=k_max)
        .map(|k| radon_number(oracle, k, limits).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let r = |k: usize| values[k - 1].attained();
    let r2 = r(2).ok_or_else(|| Error::invalid("r_2 is not attained on this space"))?;

    let mut product_bound = Vec::new();
    for a in 2..=k_max {
        for b in a..=k_max {
            if a * b > k_max {
                break;
            }
            let rhs = r(a).zip(r(b)).map(|(x, y)| x * y);
            product_bound.push(InequalityCheck {
                statement: format!("r_{} <= r_{a} * r_{b}", a * b),
                lhs: r(a * b),
                rhs,
                status: CheckStatus::of(r(a * b), rhs),
            });
        }
    }

    let mut doubling_recurrence = Vec::new();
    let mut skipped = Vec::new();
    if k_max >= 3 {
        skipped.push("r_3 <= (r_2-1)(r_2-1) + r_1 + 1".to_string());
    }
    for k in 2.. {
        if 2 * k + 1 > k_max {
            break;
        }
        let rhs = r(k + 1).zip(r(k)).map(|(a, b)| (r2 - 1) * (a - 1) + b + 1);
        doubling_recurrence.push(InequalityCheck {
            statement: format!("r_{} <= (r_2-1)(r_{}-1) + r_{k} + 1", 2 * k + 1, k + 1),
            lhs: r(2 * k + 1),
            rhs,
            status: CheckStatus::of(r(2 * k + 1), rhs),
        });
    }

    let exponent = usize::BITS - (r2 - 1).leading_zeros();
    let mut conjectured_bound = Vec::new();
    let mut power_bound = Vec::new();
    for k in 2..=k_max {
        let conj = Some((k - 1) * (r2 - 1) + 1);
        conjectured_bound.push(InequalityCheck {
            statement: format!("r_{k} <= ({k}-1)(r_2-1) + 1"),
            lhs: r(k),
            rhs: conj,
            status: CheckStatus::of(r(k), conj),
        });
        let pow = k.checked_pow(exponent);
        power_bound.push(InequalityCheck {
            statement: format!("r_{k} <= {k}^{exponent}"),
            lhs: r(k),
            rhs: pow,
            status: CheckStatus::of(r(k), pow),
        });
    }

    Ok(RecurrenceReport {
        r2,
        values,
        product_bound,
        doubling_recurrence,
        conjectured_bound,
        power_bound,
        skipped,
    })
}

fn is_heavy(count: usize, total: usize, r2: usize) -> bool {
    // count > (1 - 1/(r2-1)) * total, in integers.
    count * (r2 - 1) > (r2 - 2) * total
}

/// All points lying in every convex set that holds more than a
/// `1 - 1/(r2-1)` fraction of `set`.
pub fn centrepoints(space: &ConvexitySpace, set: &SubsetMask, r2: usize) -> Result<SubsetMask> {
    if set.is_empty() {
        return Err(Error::invalid("centrepoint needs a non-empty point set"));
    }
    if r2 < 2 {
        return Err(Error::invalid("centrepoint needs r2 >= 2"));
    }
    let total = set.len();
    let mut acc = space.full();
    for c in space.convex_sets() {
        if is_heavy((*c & *set).len(), total, r2) {
            acc &= *c;
        }
    }
    Ok(acc)
}

/// Smallest-index centrepoint; `None` would contradict the Helly-type
/// deduction for spaces with this `r2`.
pub fn centrepoint(space: &ConvexitySpace, set: &SubsetMask, r2: usize) -> Result<Option<usize>> {
    Ok(centrepoints(space, set, r2)?.first())
}

/// Minimum set of ground points meeting every convex set that holds more
/// than `epsilon * |set|` points of `set`, by exact hitting-set search.
pub fn weak_epsilon_net(
    space: &ConvexitySpace,
    set: &SubsetMask,
    epsilon: f64,
    limits: &Limits,
) -> Result<SubsetMask> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let threshold = epsilon * set.len() as f64;
    let mut heavy: Vec<SubsetMask> = space
        .convex_sets()
        .iter()
        .filter(|c| (**c & *set).len() as f64 > threshold)
        .copied()
        .collect();
    // Hitting every inclusion-minimal heavy set suffices.
    heavy.sort_by_key(|c| c.len());
    let mut minimal: Vec<SubsetMask> = Vec::new();
    for c in heavy {
        if !minimal.iter().any(|m| m.is_subset(&c)) {
            minimal.push(c);
        }
    }
    let mut nodes: u64 = 0;
    for size in 0..=space.n() {
        let mut chosen = SubsetMask::empty();
        if hit_search(&minimal, size, &mut chosen, &mut nodes, limits)? {
            return Ok(chosen);
        }
    }
    unreachable!("the full ground set meets every non-empty heavy set")
}

fn hit_search(
    sets: &[SubsetMask],
    remaining: usize,
    chosen: &mut SubsetMask,
    nodes: &mut u64,
    limits: &Limits,
) -> Result<bool> {
    *nodes += 1;
    limits.charge("weak epsilon-net search nodes", *nodes as u128)?;
    let unhit = sets
        .iter()
        .filter(|s| !s.intersects(chosen))
        .min_by_key(|s| s.len());
    let Some(target) = unhit.copied() else {
        return Ok(true);
    };
    if remaining == 0 {
        return Ok(false);
    }
    for p in target.iter() {
        chosen.insert(p);
        if hit_search(sets, remaining - 1, chosen, nodes, limits)? {
            return Ok(true);
        }
        chosen.remove(p);
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{make_example_space, ExampleKind};

    fn m(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix.iter().copied())
    }

    fn interval(n: usize) -> ConvexitySpace {
        make_example_space(&ExampleKind::Interval(n)).unwrap()
    }

    fn singleton(n: usize) -> ConvexitySpace {
        make_example_space(&ExampleKind::Singleton(n)).unwrap()
    }

    #[test]
    fn partition_examples() {
        let iv = interval(5);
        let all = SubsetMask::full(5);
        let part = tverberg_partition(&iv, &all, 2).unwrap();
        assert!(part.is_valid_for(&iv, &all));
        assert!(tverberg_partition(&iv, &m(&[0, 4]), 2).is_none());
        assert!(tverberg_partition(&iv, &m(&[0, 4]), 3).is_none());

        let sg = singleton(5);
        let p3 = tverberg_partition(&sg, &SubsetMask::full(5), 3).unwrap();
        assert!(p3.is_valid_for(&sg, &SubsetMask::full(5)));
        assert!(p3.parts.iter().filter(|p| p.len() == 1).count() <= 1);
    }

    #[test]
    fn partition_k_one_and_empty() {
        let iv = interval(4);
        let p = tverberg_partition(&iv, &m(&[1, 3]), 1).unwrap();
        assert_eq!(p.parts, vec![m(&[1, 3])]);
        assert!(tverberg_partition(&iv, &SubsetMask::empty(), 1).is_none());
        assert!(tverberg_partition(&iv, &m(&[1]), 0).is_none());
    }

    #[test]
    fn radon_examples() {
        let lim = Limits::default();
        let r = radon_number(&interval(7), 2, &lim).unwrap();
        assert_eq!(r.value, RadonValue::Attained(3));
        assert_eq!(r.certificate.len(), 2);
        assert!(tverberg_partition(&interval(7), &r.certificate, 2).is_none());

        assert_eq!(
            radon_number(&interval(9), 4, &lim).unwrap().value,
            RadonValue::Attained(7)
        );
        let free = make_example_space(&ExampleKind::Free(4)).unwrap();
        let r = radon_number(&free, 2, &lim).unwrap();
        assert_eq!(r.value, RadonValue::NotAttained);
        assert_eq!(r.certificate, SubsetMask::full(4));
        assert_eq!(
            radon_number(&interval(3), 1, &lim).unwrap().value,
            RadonValue::Attained(1)
        );
        assert!(radon_number(&interval(3), 0, &lim).is_err());
    }

    #[test]
    fn radon_budget_is_enforced() {
        let err = radon_number(&interval(9), 2, &Limits::with_budget(10)).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn interval_radon_two_is_three() {
        for n in 3..=10 {
            let r = radon_number(&interval(n), 2, &Limits::default()).unwrap();
            assert_eq!(r.value, RadonValue::Attained(3), "n={n}");
        }
        // Two points cannot be split, so the ground set itself fails.
        let r = radon_number(&interval(2), 2, &Limits::default()).unwrap();
        assert_eq!(r.value, RadonValue::NotAttained);
    }

    #[test]
    fn recurrence_report_on_interval_nine() {
        let rep = check_recurrences(&interval(9), 5, &Limits::default()).unwrap();
        let vals: Vec<_> = rep.values.iter().map(|v| v.attained()).collect();
        assert_eq!(vals, vec![Some(1), Some(3), Some(5), Some(7), Some(9)]);
        let prod = &rep.product_bound[0];
        assert_eq!(prod.statement, "r_4 <= r_2 * r_2");
        assert_eq!(
            (prod.lhs, prod.rhs, prod.status),
            (Some(7), Some(9), CheckStatus::Holds)
        );
        let dbl = &rep.doubling_recurrence[0];
        assert_eq!(
            (dbl.lhs, dbl.rhs, dbl.status),
            (Some(9), Some(12), CheckStatus::Holds)
        );
        assert_eq!(rep.skipped.len(), 1);
        assert!(!rep.any_failure());
    }

    #[test]
    fn singleton_space_meets_conjectured_bound_exactly() {
        let rep = check_recurrences(&singleton(9), 5, &Limits::default()).unwrap();
        for (k, check) in (2..).zip(&rep.conjectured_bound) {
            assert_eq!(check.lhs, Some(2 * (k - 1) + 1));
            assert_eq!(check.lhs, check.rhs);
        }
    }

    #[test]
    fn centrepoint_examples() {
        let iv = interval(9);
        assert_eq!(centrepoints(&iv, &SubsetMask::full(9), 3).unwrap(), m(&[4]));
        assert_eq!(centrepoint(&iv, &m(&[6]), 3).unwrap(), Some(6));
        let sg = singleton(5);
        assert_eq!(
            centrepoints(&sg, &SubsetMask::full(5), 3).unwrap(),
            SubsetMask::full(5)
        );
        assert!(centrepoint(&iv, &SubsetMask::empty(), 3).is_err());
    }

    #[test]
    fn epsilon_net_examples() {
        let lim = Limits::default();
        let iv = interval(8);
        let net = weak_epsilon_net(&iv, &SubsetMask::full(8), 0.49, &lim).unwrap();
        assert_eq!(net.len(), 2);
        let big = weak_epsilon_net(&iv, &SubsetMask::full(8), 1.0, &lim).unwrap();
        assert!(big.is_empty());
        // Above 1 - 1/(r2-1) = 1/2 a single centrepoint suffices.
        let one = weak_epsilon_net(&interval(9), &SubsetMask::full(9), 0.51, &lim).unwrap();
        assert_eq!(one, m(&[4]));
        assert!(weak_epsilon_net(&iv, &SubsetMask::full(8), 0.0, &lim).is_err());
    }
}
