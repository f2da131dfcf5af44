use serde::Serialize;

use crate::error::{Error, Limits, Result};
use crate::mask::SubsetMask;
use crate::nerve::{lift, n5_witness, up_closure, UpFamily};
use crate::radon::{radon_number, tverberg_partition, RadonValue};
use crate::space::HullOracle;

/// Disjoint subsets of a point set lying in one nerve family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonFamily {
    /// Ground indices of the point set; `family` uses local indices.
    pub points: Vec<usize>,
    /// The sets, as ground-index masks.
    pub sets: Vec<SubsetMask>,
    pub family: UpFamily,
    /// Ground point in the hull of every member of `family`.
    pub common_point: usize,
    pub route: DisjointRoute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisjointRoute {
    /// Blocks of size `r_2^(t-1)` merged pairwise through N5 groupings.
    BlockRecursion,
    /// Exhaustive Tverberg partition search.
    PartitionSearch,
}

impl CommonFamily {
    /// Re-checks disjointness, containment in `points`, membership of every
    /// set in `family`, and that `common_point` lies in every member's hull.
    pub fn is_valid_for<H: HullOracle + ?Sized>(&self, oracle: &H) -> bool {
        let within: SubsetMask = self.points.iter().copied().collect();
        let mut union = SubsetMask::empty();
        for s in &self.sets {
            if s.is_empty() || s.intersects(&union) || !s.is_subset(&within) {
                return false;
            }
            union |= *s;
            let local: SubsetMask = s
                .iter()
                .map(|g| {
                    self.points
                        .iter()
                        .position(|&p| p == g)
                        .expect("inside points")
                })
                .collect();
            if !self.family.contains(&local) {
                return false;
            }
        }
        self.family.min_sets().iter().all(|m| {
            oracle
                .hull(&lift(&self.points, m))
                .contains(self.common_point)
        })
    }
}

fn attained_r2<H: HullOracle + ?Sized>(oracle: &H, limits: &Limits) -> Result<usize> {
    match radon_number(oracle, 2, limits)?.value {
        RadonValue::Attained(v) => Ok(v),
        RadonValue::NotAttained => Err(Error::invalid("r_2 is not attained on this space")),
    }
}

/// Family over `points` (local indices) and `2^t` disjoint local sets in it,
/// for the block `local` of size `r2^t`.
fn block_recursion<H: HullOracle + ?Sized>(
    oracle: &H,
    points: &[usize],
    local: &[usize],
    r2: usize,
    t: u32,
) -> Result<(UpFamily, Vec<SubsetMask>)> {
    if t == 0 {
        let p = local[0];
        return Ok((
            UpFamily::point(points.len(), p),
            vec![SubsetMask::singleton(p)],
        ));
    }
    let size = r2.pow(t - 1);
    let mut families = Vec::with_capacity(r2);
    let mut sets = Vec::with_capacity(r2);
    for block in local.chunks(size) {
        let (f, s) = block_recursion(oracle, points, block, r2, t - 1)?;
        families.push(f);
        sets.push(s);
    }
    let w = n5_witness(oracle, points, &families, 2)?;
    // Set j of a group is the union of set j over the group's blocks; it
    // lies in each of their families since families are up-closed.
    let mut merged_sets = Vec::with_capacity(2 * sets[0].len());
    for group in &w.groups {
        for j in 0..sets[0].len() {
            merged_sets.push(
                group
                    .iter()
                    .fold(SubsetMask::empty(), |acc, &i| acc | sets[i][j]),
            );
        }
    }
    Ok((w.merged, merged_sets))
}

/// `2^t` disjoint subsets of `set` (which must have exactly `r_2^t` points)
/// in a common nerve family, built block by block.
pub fn jamison_disjoint_subsets<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
    t: u32,
    limits: &Limits,
) -> Result<CommonFamily> {
    let r2 = attained_r2(oracle, limits)?;
    let needed = r2.checked_pow(t).unwrap_or(usize::MAX);
    if set.len() != needed {
        return Err(Error::invalid(format!(
            "|P'| = {} but r_2^t = {needed}",
            set.len()
        )));
    }
    let points = set.to_vec();
    let local: Vec<usize> = (0..points.len()).collect();
    let (family, local_sets) = block_recursion(oracle, &points, &local, r2, t)?;
    finish(
        oracle,
        points,
        &local_sets,
        family,
        DisjointRoute::BlockRecursion,
    )
}

fn finish<H: HullOracle + ?Sized>(
    oracle: &H,
    points: Vec<usize>,
    local_sets: &[SubsetMask],
    family: UpFamily,
    route: DisjointRoute,
) -> Result<CommonFamily> {
    let meet = family
        .min_sets()
        .iter()
        .fold(SubsetMask::full(oracle.ground_size()), |acc, m| {
            acc & oracle.hull(&lift(&points, m))
        });
    let Some(common_point) = meet.first() else {
        return Err(Error::PropertyViolation(
            "merged family has no common hull point".into(),
        ));
    };
    let out = CommonFamily {
        sets: local_sets.iter().map(|s| lift(&points, s)).collect(),
        points,
        family,
        common_point,
        route,
    };
    if !out.is_valid_for(oracle) {
        return Err(Error::PropertyViolation(format!(
            "certificate failed re-validation: {out:?}"
        )));
    }
    Ok(out)
}

/// `k` disjoint subsets of `set` with a common nerve family. When
/// `r_2^t <= |P|` for some `t` with `2^t >= k`, the block recursion runs on
/// the first `r_2^t` points and surplus sets are merged; otherwise an exact
/// partition search is used. `None` means no such sets exist.
pub fn find_k_disjoint_common<H: HullOracle + ?Sized>(
    oracle: &H,
    set: &SubsetMask,
    k: usize,
    limits: &Limits,
) -> Result<Option<CommonFamily>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let points = set.to_vec();
    if points.len() < k {
        return Ok(None);
    }
    if let Ok(r2) = attained_r2(oracle, limits) {
        let t = k.next_power_of_two().trailing_zeros();
        if r2.checked_pow(t).is_some_and(|need| need <= points.len()) {
            let block: SubsetMask = points[..r2.pow(t)].iter().copied().collect();
            let built = jamison_disjoint_subsets(oracle, &block, t, limits)?;
            let mut sets = built.sets;
            // Fold surplus sets and unused points into the last set kept.
            let mut last = sets.drain(k - 1..).fold(SubsetMask::empty(), |a, s| a | s);
            last |= *set - block;
            sets.push(last);
            let local: Vec<SubsetMask> = sets
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|g| points.iter().position(|&p| p == g).expect("in P"))
                        .collect()
                })
                .collect();
            let family = up_closure(&local, points.len())?;
            return finish(
                oracle,
                points,
                &local,
                family,
                DisjointRoute::BlockRecursion,
            )
            .map(Some);
        }
    }
    let Some(part) = tverberg_partition(oracle, set, k) else {
        return Ok(None);
    };
    let local: Vec<SubsetMask> = part
        .parts
        .iter()
        .map(|s| {
            s.iter()
                .map(|g| points.iter().position(|&p| p == g).expect("in P"))
                .collect()
        })
        .collect();
    let family = up_closure(&local, points.len())?;
    finish(
        oracle,
        points,
        &local,
        family,
        DisjointRoute::PartitionSearch,
    )
    .map(Some)
}
