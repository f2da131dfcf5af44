//! Finite convexity spaces stored as explicit, intersection-closed lists of
//! convex sets, plus the [`HullOracle`] abstraction shared with spaces whose
//! hull has a closed form.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{SubsetMask, MAX_POINTS};

/// Anything that can compute convex hulls over the ground set `0..ground_size()`.
pub trait HullOracle: Sync {
    fn ground_size(&self) -> usize;

    fn hull(&self, set: &SubsetMask) -> SubsetMask;

    /// Smallest point lying in the hull of every part, if the hulls meet.
    fn common_point(&self, parts: &[SubsetMask]) -> Option<usize> {
        let mut acc = SubsetMask::full(self.ground_size());
        for part in parts {
            acc &= self.hull(part);
            if acc.is_empty() {
                return None;
            }
        }
        acc.first()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConvexitySpace {
    n: usize,
    convex_sets: Vec<SubsetMask>,
}

impl fmt::Debug for ConvexitySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexitySpace")
            .field("n", &self.n)
            .field("convex_sets", &self.convex_sets.len())
            .finish()
    }
}

/// First reason a candidate list fails to be a convexity space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OutOfRange {
        set: String,
    },
    NotCanonical {
        index: usize,
    },
    MissingEmpty,
    MissingFull,
    NotClosed {
        a: String,
        b: String,
        missing: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfRange { set } => write!(f, "set {set} has bits beyond n"),
            Violation::NotCanonical { index } => {
                write!(f, "list not sorted/duplicate-free at position {index}")
            }
            Violation::MissingEmpty => write!(f, "empty set is not convex"),
            Violation::MissingFull => write!(f, "ground set is not convex"),
            Violation::NotClosed { a, b, missing } => {
                write!(f, "{a} ∩ {b} = {missing} is not in the list")
            }
        }
    }
}

impl ConvexitySpace {
    /// Builds a space from a list that must already be intersection-closed and
    /// contain ∅ and the ground set. The list is sorted and deduplicated.
    pub fn new(n: usize, mut convex_sets: Vec<SubsetMask>) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::invalid(format!(
                "ground set of {n} points exceeds {MAX_POINTS}"
            )));
        }
        convex_sets.sort_unstable();
        convex_sets.dedup();
        let space = ConvexitySpace { n, convex_sets };
        match space.validate() {
            None => Ok(space),
            Some(v) => Err(Error::invalid(v.to_string())),
        }
    }

    /// Wraps a list without checking anything; pair with [`Self::validate`].
    pub fn from_raw(n: usize, convex_sets: Vec<SubsetMask>) -> Self {
        ConvexitySpace { n, convex_sets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convex_sets(&self) -> &[SubsetMask] {
        &self.convex_sets
    }

    pub fn full(&self) -> SubsetMask {
        SubsetMask::full(self.n)
    }

    pub fn is_convex(&self, set: &SubsetMask) -> bool {
        self.convex_sets.binary_search(set).is_ok()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_none()
    }

    /// Returns the first violated invariant, scanning in list order.
    pub fn validate(&self) -> Option<Violation> {
        if let Some(bad) = self.convex_sets.iter().find(|s| !s.fits(self.n)) {
            return Some(Violation::OutOfRange {
                set: bad.to_string(),
            });
        }
        if let Some(i) =
            (1..self.convex_sets.len()).find(|&i| self.convex_sets[i - 1] >= self.convex_sets[i])
        {
            return Some(Violation::NotCanonical { index: i });
        }
        if !self.is_convex(&SubsetMask::empty()) {
            return Some(Violation::MissingEmpty);
        }
        if !self.is_convex(&self.full()) {
            return Some(Violation::MissingFull);
        }
        for (i, a) in self.convex_sets.iter().enumerate() {
            for b in &self.convex_sets[i + 1..] {
                let meet = *a & *b;
                if !self.is_convex(&meet) {
                    return Some(Violation::NotClosed {
                        a: a.to_string(),
                        b: b.to_string(),
                        missing: meet.to_string(),
                    });
                }
            }
        }
        None
    }

    pub fn to_document(&self) -> SpaceDocument {
        SpaceDocument {
            n: self.n,
            convex_sets: self.convex_sets.iter().map(|m| m.to_hex(self.n)).collect(),
        }
    }

    pub fn from_document(doc: &SpaceDocument) -> Result<Self> {
        let sets = doc
            .convex_sets
            .iter()
            .enumerate()
            .map(|(i, h)| {
                SubsetMask::from_hex(h, doc.n)
                    .map_err(|e| Error::Parse(format!("convex_sets[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ConvexitySpace::new(doc.n, sets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("space document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SpaceDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

impl HullOracle for ConvexitySpace {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn hull(&self, set: &SubsetMask) -> SubsetMask {
        hull(self, set)
    }
}

/// Wire form of a space: masks as fixed-width lowercase hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub n: usize,
    pub convex_sets: Vec<String>,
}

/// Intersection of all convex sets containing `set`.
pub fn hull(space: &ConvexitySpace, set: &SubsetMask) -> SubsetMask {
    let mut acc = space.full();
    for c in &space.convex_sets {
        if set.is_subset(c) {
            acc &= *c;
        }
    }
    acc
}

/// Smallest convexity space on `0..n` containing every generator.
pub fn intersection_closure(
    generators: &[SubsetMask],
    n: usize,
    cap: usize,
) -> Result<ConvexitySpace> {
    if n > MAX_POINTS {
        return Err(Error::invalid(format!(
            "ground set of {n} points exceeds {MAX_POINTS}"
        )));
    }
    if let Some(g) = generators.iter().find(|g| !g.fits(n)) {
        return Err(Error::invalid(format!("generator {g} does not fit n={n}")));
    }
    let full = SubsetMask::full(n);
    let mut seen: HashSet<SubsetMask> = HashSet::new();
    let mut sets = vec![full];
    seen.insert(full);
    // Adding g to a closed family only creates the sets g ∩ c.
    for g in generators
        .iter()
        .chain(std::iter::once(&SubsetMask::empty()))
    {
        if seen.contains(g) {
            continue;
        }
        let before = sets.len();
        for i in 0..before {
            let meet = *g & sets[i];
            if seen.insert(meet) {
                sets.push(meet);
            }
        }
        if seen.insert(*g) {
            sets.push(*g);
        }
        if sets.len() > cap {
            return Err(Error::ResourceLimit {
                what: "intersection closure",
                needed: sets.len() as u128,
                cap: cap as u128,
            });
        }
    }
    sets.sort_unstable();
    Ok(ConvexitySpace {
        n,
        convex_sets: sets,
    })
}

/// Builtin families of example spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    /// Contiguous index ranges of a path.
    Interval(usize),
    /// ∅, the ground set, and all singletons.
    Singleton(usize),
    /// Every subset.
    Free(usize),
    /// Products of intervals on a grid, points indexed row-major.
    BoxProduct(Vec<usize>),
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleKind::Interval(n) => write!(f, "interval:{n}"),
            ExampleKind::Singleton(n) => write!(f, "singleton:{n}"),
            ExampleKind::Free(n) => write!(f, "free:{n}"),
            ExampleKind::BoxProduct(sizes) => {
                let dims: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                write!(f, "box:{}", dims.join("x"))
            }
        }
    }
}

impl std::str::FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("space specifier {s:?} needs KIND:PARAM")))?;
        let count = |a: &str| {
            a.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad size {a:?} in {s:?}")))
        };
        match kind {
            "interval" => Ok(ExampleKind::Interval(count(arg)?)),
            "singleton" => Ok(ExampleKind::Singleton(count(arg)?)),
            "free" => Ok(ExampleKind::Free(count(arg)?)),
            "box" => Ok(ExampleKind::BoxProduct(
                arg.split('x').map(count).collect::<Result<_>>()?,
            )),
            other => Err(Error::Parse(format!("unknown space kind {other:?}"))),
        }
    }
}

/// Largest free space materialized (2^n convex sets).
const FREE_MAX_POINTS: usize = 20;

pub fn make_example_space(kind: &ExampleKind) -> Result<ConvexitySpace> {
    let check_n = |n: usize| {
        if n == 0 {
            Err(Error::invalid("example spaces need n >= 1"))
        } else if n > MAX_POINTS {
            Err(Error::ResourceLimit {
                what: "ground set width",
                needed: n as u128,
                cap: MAX_POINTS as u128,
            })
        } else {
            Ok(())
        }
    };
    let (n, mut sets) = match kind {
        ExampleKind::Interval(n) => {
            check_n(*n)?;
            let mut sets = Vec::new();
            for lo in 0..*n {
                for hi in lo..*n {
                    sets.push(SubsetMask::from_indices(lo..=hi));
                }
            }
            (*n, sets)
        }
        ExampleKind::Singleton(n) => {
            check_n(*n)?;
            let mut sets: Vec<_> = (0..*n).map(SubsetMask::singleton).collect();
            sets.push(SubsetMask::full(*n));
            (*n, sets)
        }
        ExampleKind::Free(n) => {
            check_n(*n)?;
            if *n > FREE_MAX_POINTS {
                return Err(Error::ResourceLimit {
                    what: "free space convex sets",
                    needed: 1u128 << n.min(&127),
                    cap: 1u128 << FREE_MAX_POINTS,
                });
            }
            let sets = (0u64..1 << n).map(SubsetMask::from_bits).collect();
            (*n, sets)
        }
        ExampleKind::BoxProduct(sizes) => {
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(Error::invalid("box product needs positive axis sizes"));
            }
            let n = sizes
                .iter()
                .try_fold(1usize, |acc, &s| acc.checked_mul(s))
                .filter(|&n| n <= MAX_POINTS)
                .ok_or(Error::ResourceLimit {
                    what: "ground set width",
                    needed: sizes.iter().map(|&s| s as u128).product(),
                    cap: MAX_POINTS as u128,
                })?;
            (n, box_sets(sizes))
        }
    };
    sets.push(SubsetMask::empty());
    ConvexitySpace::new(n, sets)
}

fn box_sets(sizes: &[usize]) -> Vec<SubsetMask> {
    // Each box is a choice of [lo, hi] per axis.
    let mut ranges: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::new();
        for prefix in &ranges {
            for lo in 0..s {
                for hi in lo..s {
                    let mut r = prefix.clone();
                    r.push((lo, hi));
                    next.push(r);
                }
            }
        }
        ranges = next;
    }
    ranges
        .iter()
        .map(|box_ranges| {
            let mut points = vec![0usize];
            for (axis, &(lo, hi)) in box_ranges.iter().enumerate() {
                let size = sizes[axis];
                points = points
                    .iter()
                    .flat_map(|&p| (lo..=hi).map(move |c| p * size + c))
                    .collect();
            }
            SubsetMask::from_indices(points)
        })
        .collect()
}

/// Intersection closure of `generators` seeded subsets of `0..n`, each point
/// kept with probability 1/2.
pub fn random_space(n: usize, generators: usize, seed: u64) -> Result<ConvexitySpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<SubsetMask> = (0..generators)
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.5)).collect())
        .collect();
    intersection_closure(&gens, n, 1 << 20)
}
