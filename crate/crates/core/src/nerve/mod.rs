//! Nerves of hull families.
//!
//! For a point set `P` in a convexity space, `Nv(P)` collects every family
//! `F` of subsets of `P` whose hulls share a point. It is a downset, closed
//! under up-closure of its members, so it is determined by its maximal
//! families; those are exactly the maximal `F_x = {S ⊆ P : x ∈ hull(S)}`.

mod embed;
mod family;
mod n5;
mod symmetry;

pub use embed::{nerve_to_space, NerveSpace};
pub use family::{minimal_antichain, up_closure, FamilyBits, UpFamily};
pub use n5::{check_n5_abstract, n5_witness, N5Outcome, N5Witness, NerveIndex, WitnessRoute};
pub use symmetry::PermutationGroup;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Limits, Result};
use crate::mask::SubsetMask;
use crate::space::HullOracle;

/// The antichain of maximal families of a nerve over `P = 0..ground_size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Nerve {
    ground_size: usize,
    maximal_families: Vec<UpFamily>,
}

impl Nerve {
    /// Keeps the inclusion-maximal families, deduplicated and sorted.
    pub fn new(ground_size: usize, families: Vec<UpFamily>) -> Result<Self> {
        for f in &families {
            if f.ground_size() != ground_size {
                return Err(Error::invalid(format!(
                    "family over {} points in a nerve over {ground_size}",
                    f.ground_size()
                )));
            }
            if f.min_sets().iter().any(|s| s.is_empty()) {
                return Err(Error::invalid(
                    "a nerve family cannot contain the empty set",
                ));
            }
        }
        let mut families = families;
        families.sort_unstable();
        families.dedup();
        let maximal: Vec<UpFamily> = families
            .iter()
            .enumerate()
            .filter(|(i, f)| {
                !families
                    .iter()
                    .enumerate()
                    .any(|(j, g)| *i != j && f.is_subfamily_of(g))
            })
            .map(|(_, f)| f.clone())
            .collect();
        Ok(Nerve {
            ground_size,
            maximal_families: maximal,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn maximal_families(&self) -> &[UpFamily] {
        &self.maximal_families
    }

    pub fn len(&self) -> usize {
        self.maximal_families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maximal_families.is_empty()
    }

    /// `F ∈ Nv` iff some maximal family contains it.
    pub fn contains_family(&self, family: &UpFamily) -> bool {
        self.maximal_families
            .iter()
            .any(|m| family.is_subfamily_of(m))
    }

    pub fn index_of(&self, family: &UpFamily) -> Option<usize> {
        self.maximal_families.binary_search(family).ok()
    }

    pub fn to_document(&self) -> NerveDocument {
        NerveDocument {
            ground_size: self.ground_size,
            maximal_families: self
                .maximal_families
                .iter()
                .map(|f| {
                    f.min_sets()
                        .iter()
                        .map(|s| s.to_hex(self.ground_size))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &NerveDocument) -> Result<Self> {
        let families = doc
            .maximal_families
            .iter()
            .enumerate()
            .map(|(i, sets)| {
                let masks = sets
                    .iter()
                    .map(|h| SubsetMask::from_hex(h, doc.ground_size))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Parse(format!("maximal_families[{i}]: {e}")))?;
                up_closure(&masks, doc.ground_size)
            })
            .collect::<Result<Vec<_>>>()?;
        Nerve::new(doc.ground_size, families)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("nerve document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NerveDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Wire form of a nerve: each maximal family as its minimal sets in hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveDocument {
    pub ground_size: usize,
    pub maximal_families: Vec<Vec<String>>,
}

fn local_to_ground(points: &[usize], local: usize) -> SubsetMask {
    let mut out = SubsetMask::empty();
    let mut bits = local;
    while bits != 0 {
        out.insert(points[bits.trailing_zeros() as usize]);
        bits &= bits - 1;
    }
    out
}

/// Maps a subset of `P` (local indices) to ground-set indices.
pub fn lift(points: &[usize], local: &SubsetMask) -> SubsetMask {
    local.iter().map(|i| points[i]).collect()
}

/// `F_x` for every ground point `x`, over the ordered point list `points`
/// (local index `i` is ground point `points[i]`).
pub fn point_families<H: HullOracle + ?Sized>(
    oracle: &H,
    points: &[usize],
    limits: &Limits,
) -> Result<Vec<FamilyBits>> {
    let m = points.len();
    limits.check_lattice(m)?;
    let n = oracle.ground_size();
    if let Some(&bad) = points.iter().find(|&&p| p >= n) {
        return Err(Error::invalid(format!(
            "point {bad} outside ground set of {n}"
        )));
    }
    let mut fams = vec![FamilyBits::empty(m); n];
    for s in 1..1usize << m {
        let h = oracle.hull(&local_to_ground(points, s));
        for x in h.iter() {
            fams[x].insert(s);
        }
    }
    Ok(fams)
}

/// `Nv(P)` for `P` listed in the given order.
pub fn compute_nerve_on<H: HullOracle + ?Sized>(
    oracle: &H,
    points: &[usize],
    limits: &Limits,
) -> Result<Nerve> {
    let fams = point_families(oracle, points, limits)?;
    let mut distinct: Vec<FamilyBits> = Vec::new();
    for f in fams {
        if !distinct.contains(&f) {
            distinct.push(f);
        }
    }
    let maximal: Vec<UpFamily> = distinct
        .iter()
        .filter(|f| !distinct.iter().any(|g| g != *f && f.is_subset(g)))
        .map(FamilyBits::to_family)
        .collect();
    Nerve::new(points.len(), maximal)
}

/// `Nv(P)` with `P`'s points indexed in ascending ground order.
pub fn compute_nerve<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
    limits: &Limits,
) -> Result<Nerve> {
    compute_nerve_on(oracle, &set.to_vec(), limits)
}

/// Maximum number of pairwise-disjoint sets among `sets`, with one optimal
/// choice. Disjoint members of an up-family shrink to disjoint minimal
/// members, so running this on minimal sets is exact.
pub fn max_disjoint(sets: &[SubsetMask]) -> Vec<SubsetMask> {
    let mut sorted: Vec<SubsetMask> = sets.iter().filter(|s| !s.is_empty()).copied().collect();
    sorted.sort_unstable_by_key(|s| (s.len(), *s));
    let universe = sorted.iter().fold(SubsetMask::empty(), |a, s| a | *s);
    let mut best = Vec::new();
    let mut current = Vec::new();
    packing_search(&sorted, 0, universe, &mut current, &mut best);
    best
}

fn packing_search(
    sets: &[SubsetMask],
    start: usize,
    free: SubsetMask,
    current: &mut Vec<SubsetMask>,
    best: &mut Vec<SubsetMask>,
) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    for j in start..sets.len() {
        // Remaining sets are no smaller than sets[j].
        if current.len() + free.len() / sets[j].len() <= best.len() {
            return;
        }
        if sets[j].is_subset(&free) {
            current.push(sets[j]);
            packing_search(sets, j + 1, free - sets[j], current, best);
            current.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NReport {
    /// Maximal families form an antichain and each is stored as a proper
    /// minimal antichain (downset and up-closure semantics are structural).
    pub n1_n2: bool,
    /// Every `F(p)` lies below some maximal family.
    pub n3: bool,
    pub n3_missing: Vec<usize>,
    /// Largest number of pairwise-disjoint members of a single family.
    pub packing_number: usize,
    pub packing_family: Option<usize>,
    pub packing_sets: Vec<SubsetMask>,
}

impl NReport {
    pub fn holds(&self) -> bool {
        self.n1_n2 && self.n3
    }
}

pub fn check_n_properties(nv: &Nerve) -> NReport {
    let fams = nv.maximal_families();
    let antichain = fams.iter().enumerate().all(|(i, f)| {
        fams.iter()
            .enumerate()
            .all(|(j, g)| i == j || !f.is_subfamily_of(g))
    });
    let minimal = fams
        .iter()
        .all(|f| minimal_antichain(f.min_sets()) == f.min_sets());
    let n3_missing: Vec<usize> = (0..nv.ground_size())
        .filter(|&p| !nv.contains_family(&UpFamily::point(nv.ground_size(), p)))
        .collect();
    let mut packing_number = 0;
    let mut packing_family = None;
    let mut packing_sets = Vec::new();
    for (i, f) in fams.iter().enumerate() {
        let pack = max_disjoint(f.min_sets());
        if pack.len() > packing_number {
            packing_number = pack.len();
            packing_family = Some(i);
            packing_sets = pack;
        }
    }
    NReport {
        n1_n2: antichain && minimal,
        n3: n3_missing.is_empty(),
        n3_missing,
        packing_number,
        packing_family,
        packing_sets,
    }
}
