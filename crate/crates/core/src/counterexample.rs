//! The nerve over `P = {0, …, 3(k-1)}` built from the A, B and C families,
//! and exhaustive checks that its space has `r_2 = 4` while `P` itself has
//! no Tverberg partition into `k` parts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::error::{Error, Limits, Result};
use crate::mask::{set_partitions, Combinations, SubsetMask};
use crate::nerve::{
    check_n5_abstract, check_n_properties, nerve_to_space, up_closure, N5Outcome, Nerve,
    NerveIndex, PermutationGroup, UpFamily,
};
use crate::radon::{radon_number, tverberg_partition, RadonValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CexFamilyId {
    A {
        x: usize,
    },
    /// Pairs `{x,y}` and `{z,w}` with `x<y`, `z<w` and `(x,y) < (z,w)`.
    B {
        x: usize,
        y: usize,
        z: usize,
        w: usize,
    },
    C {
        x: usize,
        y: usize,
    },
}

impl CexFamilyId {
    /// Canonical B id for two disjoint pairs given in any order.
    pub fn b(p: (usize, usize), q: (usize, usize)) -> Result<Self> {
        let sort = |(a, b): (usize, usize)| if a < b { (a, b) } else { (b, a) };
        let (p, q) = (sort(p), sort(q));
        let (p, q) = if p < q { (p, q) } else { (q, p) };
        let all = [p.0, p.1, q.0, q.1];
        if (0..4).any(|i| (i + 1..4).any(|j| all[i] == all[j])) {
            return Err(Error::invalid("B needs four distinct points"));
        }
        Ok(CexFamilyId::B {
            x: p.0,
            y: p.1,
            z: q.0,
            w: q.1,
        })
    }

    pub fn c(x: usize, y: usize) -> Self {
        CexFamilyId::C {
            x: x.min(y),
            y: x.max(y),
        }
    }

    pub fn kind(&self) -> char {
        match self {
            CexFamilyId::A { .. } => 'A',
            CexFamilyId::B { .. } => 'B',
            CexFamilyId::C { .. } => 'C',
        }
    }

    /// The listed (non-minimized) generating sets of the family.
    fn generators(&self, n: usize) -> Vec<SubsetMask> {
        let sets = |k: usize| Combinations::new(n, k).map(SubsetMask::from_indices);
        let mut out: Vec<SubsetMask> = sets(4).collect();
        match *self {
            CexFamilyId::A { x } => out.push(SubsetMask::singleton(x)),
            CexFamilyId::B { x, y, z, w } => {
                out.push(SubsetMask::from_indices([x, y]));
                out.push(SubsetMask::from_indices([z, w]));
                let hit = SubsetMask::from_indices([x, y, z, w]);
                out.extend(sets(3).filter(|s| s.intersects(&hit)));
            }
            CexFamilyId::C { x, y } => {
                out.push(SubsetMask::from_indices([x, y]));
                out.extend(sets(3));
            }
        }
        out
    }

    pub fn family(&self, n: usize) -> UpFamily {
        up_closure(&self.generators(n), n).expect("generators fit the ground set")
    }
}

impl fmt::Display for CexFamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CexFamilyId::A { x } => write!(f, "A[{x}]"),
            CexFamilyId::B { x, y, z, w } => write!(f, "B[{x},{y}:{z},{w}]"),
            CexFamilyId::C { x, y } => write!(f, "C[{x},{y}]"),
        }
    }
}

impl Serialize for CexFamilyId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// All family ids for `|P| = n`, A before B before C.
pub fn family_ids(n: usize) -> Vec<CexFamilyId> {
    let mut ids: Vec<CexFamilyId> = (0..n).map(|x| CexFamilyId::A { x }).collect();
    let pairs: Vec<(usize, usize)> = Combinations::new(n, 2).map(|c| (c[0], c[1])).collect();
    for (i, &p) in pairs.iter().enumerate() {
        for &q in &pairs[i + 1..] {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                ids.push(CexFamilyId::B {
                    x: p.0,
                    y: p.1,
                    z: q.0,
                    w: q.1,
                });
            }
        }
    }
    ids.extend(pairs.iter().map(|&(x, y)| CexFamilyId::C { x, y }));
    ids
}

/// The counterexample nerve with the id of every maximal family
/// (`ids[i]` names `nerve.maximal_families()[i]`).
#[derive(Debug, Clone)]
pub struct CexNerve {
    pub k: usize,
    pub nerve: Nerve,
    pub ids: Vec<CexFamilyId>,
}

impl CexNerve {
    pub fn ground_size(&self) -> usize {
        self.nerve.ground_size()
    }

    pub fn index_of(&self, id: &CexFamilyId) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn family(&self, id: &CexFamilyId) -> Option<&UpFamily> {
        self.index_of(id).map(|i| &self.nerve.maximal_families()[i])
    }

    pub fn counts(&self) -> FamilyCounts {
        let count = |c| self.ids.iter().filter(|i| i.kind() == c).count();
        FamilyCounts {
            a: count('A'),
            b: count('B'),
            c: count('C'),
            total: self.ids.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub total: usize,
}

pub fn build_counterexample(k: usize, limits: &Limits) -> Result<CexNerve> {
    if k < 3 {
        return Err(Error::invalid(format!("k must be at least 3, got {k}")));
    }
    let n = 3 * (k - 1) + 1;
    limits.check_lattice(n)?;
    let ids = family_ids(n);
    let families: Vec<UpFamily> = ids.iter().map(|id| id.family(n)).collect();
    let by_family: HashMap<&UpFamily, CexFamilyId> =
        families.iter().zip(&ids).map(|(f, &id)| (f, id)).collect();
    let nerve = Nerve::new(n, families.clone())?;
    if nerve.len() != ids.len() {
        return Err(Error::PropertyViolation(format!(
            "{} of {} families are not maximal",
            ids.len() - nerve.len(),
            ids.len()
        )));
    }
    let ids = nerve
        .maximal_families()
        .iter()
        .map(|f| by_family[f])
        .collect();
    Ok(CexNerve { k, nerve, ids })
}

/// `e(F)`: the two-element members of `F`.
pub fn edge_set(family: &UpFamily) -> Vec<SubsetMask> {
    family.pairs()
}

/// N5 with `r = 4`, `t = 2`, optionally reduced by the symmetric group on `P`.
pub fn verify_r2_upper(cex: &CexNerve, use_symmetry: bool, limits: &Limits) -> Result<N5Outcome> {
    let group = use_symmetry.then(|| PermutationGroup::symmetric(cex.ground_size()));
    check_n5_abstract(&cex.nerve, 4, 2, group.as_ref(), limits)
}

/// First triple of distinct families (in id order) with no bipartition whose
/// union of intersections lies below a maximal family.
pub fn verify_r2_lower(cex: &CexNerve) -> Option<[CexFamilyId; 3]> {
    let index = NerveIndex::new(cex.ground_size(), cex.nerve.maximal_families());
    let mut order: Vec<usize> = (0..cex.ids.len()).collect();
    order.sort_by_key(|&i| cex.ids[i]);
    let groupings = set_partitions(3, 2);
    let w = index.stride();
    let mut union = vec![0u64; w];
    for c in Combinations::new(order.len(), 3) {
        let fams = [order[c[0]], order[c[1]], order[c[2]]];
        let splits = groupings.iter().any(|grouping| {
            union.fill(0);
            for &block in grouping {
                let mut meet = vec![u64::MAX; w];
                for (pos, &f) in fams.iter().enumerate() {
                    if block >> pos & 1 == 1 {
                        for (m, x) in meet.iter_mut().zip(index.family_words(f)) {
                            *m &= x;
                        }
                    }
                }
                for (u, m) in union.iter_mut().zip(&meet) {
                    *u |= m;
                }
            }
            index.find_container(&union).is_some()
        });
        if !splits {
            return Some(fams.map(|f| cex.ids[f]));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Packing {
    pub max: usize,
    pub family: Option<CexFamilyId>,
    pub sets: Vec<SubsetMask>,
}

/// Largest number of pairwise-disjoint members of one maximal family.
pub fn verify_no_k_disjoint(cex: &CexNerve) -> Packing {
    let rep = check_n_properties(&cex.nerve);
    Packing {
        max: rep.packing_number,
        family: rep.packing_family.map(|i| cex.ids[i]),
        sets: rep.packing_sets,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CexOptions {
    pub symmetry: bool,
    pub space_crosscheck: bool,
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceCrossCheck {
    pub points: usize,
    pub r2: RadonValue,
    /// A set one smaller than `r2` with no Radon partition.
    pub certificate: SubsetMask,
    /// The embedded copy of `P` has no Tverberg partition into `k` parts.
    pub embedded_p_unpartitionable: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseError {
    pub phase: &'static str,
    pub message: String,
    pub resource_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CexReport {
    pub k: usize,
    pub ground_size: usize,
    pub counts: FamilyCounts,
    pub n_properties_hold: bool,
    pub n5: Option<N5Outcome>,
    pub packing: Option<Packing>,
    pub r2_lower_witness: Option<[CexFamilyId; 3]>,
    pub r2: Option<usize>,
    /// Lower bound on `r_k` certified when verification succeeds.
    pub rk_lower_bound: usize,
    /// `(k-1)(r_2-1)+1` with `r_2 = 4`.
    pub conjectured_bound: usize,
    pub exceeds_conjecture: bool,
    pub space_crosscheck: Option<SpaceCrossCheck>,
    pub errors: Vec<PhaseError>,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<&'static str, u128>>,
}

impl CexReport {
    pub fn hit_resource_limit(&self) -> bool {
        self.errors.iter().any(|e| e.resource_limit)
    }
}

fn phase_error(phase: &'static str, e: &Error) -> PhaseError {
    PhaseError {
        phase,
        message: e.to_string(),
        resource_limit: e.is_resource_limit(),
    }
}

/// Builds the nerve for `k` and runs every verification, keeping partial
/// results when a phase fails.
pub fn counterexample_report(k: usize, options: CexOptions, limits: &Limits) -> Result<CexReport> {
    let mut timings = BTreeMap::new();
    let clock = Instant::now();
    let cex = build_counterexample(k, limits)?;
    timings.insert("build", clock.elapsed().as_millis());
    let mut errors = Vec::new();

    let n_properties_hold = check_n_properties(&cex.nerve).holds();

    let clock = Instant::now();
    let n5 = match verify_r2_upper(&cex, options.symmetry, limits) {
        Ok(o) => Some(o),
        Err(e) => {
            errors.push(phase_error("n5", &e));
            None
        }
    };
    timings.insert("n5", clock.elapsed().as_millis());

    let clock = Instant::now();
    let packing = verify_no_k_disjoint(&cex);
    timings.insert("packing", clock.elapsed().as_millis());

    let clock = Instant::now();
    let lower = verify_r2_lower(&cex);
    timings.insert("lower", clock.elapsed().as_millis());

    let space_crosscheck = if options.space_crosscheck {
        let clock = Instant::now();
        let check = nerve_to_space(&cex.nerve, limits).and_then(|space| {
            let r = radon_number(&space, 2, limits)?;
            let embedded = space.embedded_set();
            let unpartitionable = tverberg_partition(&space, &embedded, k).is_none();
            Ok(SpaceCrossCheck {
                points: space.points().len(),
                r2: r.value,
                certificate: r.certificate,
                embedded_p_unpartitionable: unpartitionable,
                agrees: r.value == RadonValue::Attained(4) && unpartitionable,
            })
        });
        timings.insert("space_crosscheck", clock.elapsed().as_millis());
        match check {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(phase_error("space_crosscheck", &e));
                None
            }
        }
    } else {
        None
    };

    let n5_holds = n5.as_ref().is_some_and(|o| o.holds);
    let verified = n_properties_hold
        && n5_holds
        && packing.max < k
        && lower.is_some()
        && space_crosscheck.as_ref().is_none_or(|c| c.agrees);
    let rk_lower_bound = cex.ground_size() + 1;
    let conjectured_bound = (k - 1) * 3 + 1;
    Ok(CexReport {
        k,
        ground_size: cex.ground_size(),
        counts: cex.counts(),
        n_properties_hold,
        n5,
        packing: Some(packing),
        r2_lower_witness: lower,
        r2: (n5_holds && lower.is_some()).then_some(4),
        rk_lower_bound,
        conjectured_bound,
        exceeds_conjecture: verified && rk_lower_bound > conjectured_bound,
        space_crosscheck,
        errors,
        verified,
        timings_ms: options.timings.then_some(timings),
    })
}
