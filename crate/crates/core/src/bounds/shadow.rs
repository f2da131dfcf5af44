use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::{Combinations, SubsetMask};

/// A set of `d`-tuples of `r`-element subsets of `0..ground_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleFamily {
    d: usize,
    r: usize,
    ground_size: usize,
    tuples: BTreeSet<Vec<SubsetMask>>,
}

impl TupleFamily {
    pub fn new(
        d: usize,
        r: usize,
        ground_size: usize,
        tuples: impl IntoIterator<Item = Vec<SubsetMask>>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("tuple dimension must be at least 1"));
        }
        let mut set = BTreeSet::new();
        for t in tuples {
            if t.len() != d {
                return Err(Error::invalid(format!(
                    "tuple {t:?} has {} coordinates, want {d}",
                    t.len()
                )));
            }
            if let Some(c) = t.iter().find(|c| c.len() != r || !c.fits(ground_size)) {
                return Err(Error::invalid(format!(
                    "coordinate {c} is not an {r}-subset of 0..{ground_size}"
                )));
            }
            set.insert(t);
        }
        Ok(TupleFamily {
            d,
            r,
            ground_size,
            tuples: set,
        })
    }

    /// Every tuple of `r`-subsets of `0..ground_size`.
    pub fn full(d: usize, r: usize, ground_size: usize) -> Result<Self> {
        let level: Vec<SubsetMask> = Combinations::new(ground_size, r)
            .map(SubsetMask::from_indices)
            .collect();
        let mut tuples = vec![Vec::new()];
        for _ in 0..d {
            tuples = tuples
                .into_iter()
                .flat_map(|t: Vec<SubsetMask>| {
                    level.iter().map(move |s| {
                        let mut t = t.clone();
                        t.push(*s);
                        t
                    })
                })
                .collect();
        }
        TupleFamily::new(d, r, ground_size, tuples)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<SubsetMask>> {
        self.tuples.iter()
    }
}

/// All tuples obtained by deleting one element from every coordinate.
pub fn shadow(family: &TupleFamily) -> Result<TupleFamily> {
    if family.r == 0 {
        return Err(Error::Domain(
            "the shadow of a 0-uniform family is undefined".into(),
        ));
    }
    let mut out = BTreeSet::new();
    for t in &family.tuples {
        let mut partial: Vec<Vec<SubsetMask>> = vec![Vec::with_capacity(family.d)];
        for c in t {
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    c.iter().map(move |x| {
                        let mut p = p.clone();
                        let mut smaller = *c;
                        smaller.remove(x);
                        p.push(smaller);
                        p
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    Ok(TupleFamily {
        d: family.d,
        r: family.r - 1,
        ground_size: family.ground_size,
        tuples: out,
    })
}

/// `x(x-1)…(x-r+1)/r!`.
pub fn generalized_binomial(x: f64, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// The `x >= r` with `C(x, r)^d = v`, by bisection on `[r, r + v]`.
pub fn invert_binomial(v: f64, r: usize, d: usize) -> Result<f64> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain(format!(
            "cannot invert at v = {v}; need v >= 1"
        )));
    }
    if r == 0 || d == 0 {
        return Err(Error::Domain(
            "invert_binomial needs r >= 1 and d >= 1".into(),
        ));
    }
    let f = |x: f64| generalized_binomial(x, r).powi(d as i32);
    let (mut lo, mut hi) = (r as f64, r as f64 + v);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Absolute slack allowed when comparing a shadow size against its bound.
pub const KK_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KkReport {
    pub d: usize,
    pub r: usize,
    pub size: usize,
    pub x: f64,
    pub shadow_size: usize,
    /// `C(x, r-1)^d`.
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Compares `|∂F|` with `C(x, r-1)^d` where `|F| = C(x, r)^d`.
pub fn check_kk_bound(family: &TupleFamily) -> Result<KkReport> {
    if family.is_empty() {
        return Err(Error::invalid("the shadow bound needs a non-empty family"));
    }
    let x = invert_binomial(family.len() as f64, family.r, family.d)?;
    let shadow_size = shadow(family)?.len();
    let bound = generalized_binomial(x, family.r - 1).powi(family.d as i32);
    let slack = shadow_size as f64 - bound;
    Ok(KkReport {
        d: family.d,
        r: family.r,
        size: family.len(),
        x,
        shadow_size,
        bound,
        slack,
        holds: slack >= -KK_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub violations: usize,
    pub first_violation: Option<KkReport>,
    pub min_slack: f64,
}

impl SweepSummary {
    fn new() -> Self {
        SweepSummary {
            instances: 0,
            violations: 0,
            first_violation: None,
            min_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, rep: KkReport) {
        self.instances += 1;
        self.min_slack = self.min_slack.min(rep.slack);
        if !rep.holds {
            self.violations += 1;
            self.first_violation.get_or_insert(rep);
        }
    }
}

/// Every non-empty family of 2-subsets (d = 1) of grounds up to `max_ground`.
pub fn kk_exhaustive_pairs(max_ground: usize) -> Result<SweepSummary> {
    let mut summary = SweepSummary::new();
    for m in 2..=max_ground {
        let pairs: Vec<SubsetMask> = Combinations::new(m, 2)
            .map(SubsetMask::from_indices)
            .collect();
        if pairs.len() > 20 {
            return Err(Error::ResourceLimit {
                what: "pair families",
                needed: 1u128 << pairs.len(),
                cap: 1 << 20,
            });
        }
        for bits in 1u32..1 << pairs.len() {
            let chosen = (0..pairs.len())
                .filter(|&i| bits >> i & 1 == 1)
                .map(|i| vec![pairs[i]]);
            summary.record(check_kk_bound(&TupleFamily::new(1, 2, m, chosen)?)?);
        }
    }
    Ok(summary)
}

/// Seeded random families with `d <= max_d`, `1 <= r <= max_r`, ground up
/// to `max_ground` and between 1 and 24 sampled tuples.
pub fn kk_random(
    instances: usize,
    max_d: usize,
    max_r: usize,
    max_ground: usize,
    seed: u64,
) -> Result<SweepSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = SweepSummary::new();
    for _ in 0..instances {
        let d = rng.gen_range(1..=max_d);
        let r = rng.gen_range(1..=max_r);
        let ground = rng.gen_range(r.max(1)..=max_ground.max(r));
        let count = rng.gen_range(1..=24);
        let tuples: Vec<Vec<SubsetMask>> = (0..count)
            .map(|_| (0..d).map(|_| random_subset(&mut rng, ground, r)).collect())
            .collect();
        summary.record(check_kk_bound(&TupleFamily::new(d, r, ground, tuples)?)?);
    }
    Ok(summary)
}

pub(crate) fn random_subset(rng: &mut impl Rng, ground: usize, size: usize) -> SubsetMask {
    rand::seq::index::sample(rng, ground, size)
        .into_iter()
        .collect()
}
