use smallvec::SmallVec;

use super::family::UpFamily;
use super::n5::NerveIndex;
use super::Nerve;
use crate::error::{Error, Limits, Result};
use crate::mask::{SubsetMask, MAX_POINTS};
use crate::space::{intersection_closure, ConvexitySpace, HullOracle};

/// A convexity space realizing a nerve. Its points are families over `P`:
/// the maximal families of the nerve, then each `F(p)` not already listed.
/// Hulls are evaluated in closed form: `hull(A) = {G : ⋂A ⊆ G}`.
#[derive(Debug, Clone)]
pub struct NerveSpace {
    points: Vec<UpFamily>,
    embedding: Vec<usize>,
    index: NerveIndex,
}

/// Builds the space of a nerve satisfying N1 to N3.
pub fn nerve_to_space(nv: &Nerve, limits: &Limits) -> Result<NerveSpace> {
    let g = nv.ground_size();
    limits.check_lattice(g)?;
    let mut points: Vec<UpFamily> = nv.maximal_families().to_vec();
    let mut embedding = Vec::with_capacity(g);
    for p in 0..g {
        let fp = UpFamily::point(g, p);
        if !nv.contains_family(&fp) {
            return Err(Error::invalid(format!(
                "F({p}) is not in the nerve (N3 fails)"
            )));
        }
        let at = match points.iter().position(|f| *f == fp) {
            Some(i) => i,
            None => {
                points.push(fp);
                points.len() - 1
            }
        };
        embedding.push(at);
    }
    if points.len() > MAX_POINTS {
        return Err(Error::ResourceLimit {
            what: "nerve space points",
            needed: points.len() as u128,
            cap: MAX_POINTS as u128,
        });
    }
    let index = NerveIndex::new(g, &points);
    Ok(NerveSpace {
        points,
        embedding,
        index,
    })
}

impl NerveSpace {
    pub fn points(&self) -> &[UpFamily] {
        &self.points
    }

    /// `embedding[p]` is the point standing for `F(p)`.
    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn embedded_set(&self) -> SubsetMask {
        self.embedding.iter().copied().collect()
    }

    fn stride(&self) -> usize {
        self.index.stride()
    }

    fn meet(&self, set: &SubsetMask, out: &mut [u64]) {
        out.fill(u64::MAX);
        for y in set.iter() {
            for (o, w) in out.iter_mut().zip(self.index.family_words(y)) {
                *o &= w;
            }
        }
    }

    fn above(&self, family: &[u64]) -> SubsetMask {
        (0..self.points.len())
            .filter(|&y| {
                family
                    .iter()
                    .zip(self.index.family_words(y))
                    .all(|(a, b)| a & !b == 0)
            })
            .collect()
    }

    /// The explicit space: intersection closure of the sets
    /// `{G : S ∈ G}` for `S ⊆ P`, together with `∅` and all points.
    pub fn materialize(&self, limits: &Limits) -> Result<ConvexitySpace> {
        let g = self.index.ground_size();
        let n = self.points.len();
        let mut generators = vec![SubsetMask::empty(), SubsetMask::full(n)];
        for s in 1..1usize << g {
            generators.push(
                (0..n)
                    .filter(|&y| self.index.family_words(y)[s / 64] >> (s % 64) & 1 == 1)
                    .collect(),
            );
        }
        intersection_closure(&generators, n, limits.closure_cap)
    }
}

impl HullOracle for NerveSpace {
    fn ground_size(&self) -> usize {
        self.points.len()
    }

    fn hull(&self, set: &SubsetMask) -> SubsetMask {
        let mut meet: SmallVec<[u64; 4]> = SmallVec::from_elem(0, self.stride());
        self.meet(set, &mut meet);
        self.above(&meet)
    }

    fn common_point(&self, parts: &[SubsetMask]) -> Option<usize> {
        // A point lies in every part's hull iff it contains the union of
        // the parts' intersections.
        let w = self.stride();
        let mut meet: SmallVec<[u64; 4]> = SmallVec::from_elem(0, w);
        let mut union: SmallVec<[u64; 4]> = SmallVec::from_elem(0, w);
        for part in parts {
            if part.is_empty() {
                return None;
            }
            self.meet(part, &mut meet);
            for (u, m) in union.iter_mut().zip(&meet) {
                *u |= m;
            }
        }
        self.index.find_container(&union)
    }
}
