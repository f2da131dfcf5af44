use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::shadow::random_subset;
use crate::error::{Error, Result};
use crate::mask::{binomial, Combinations, SubsetMask};

/// Largest independent set size in a graph on `0..adj.len()` given by
/// neighbour bit masks, stopping once `target` is reached.
fn independent_at_least(adj: &[u64], candidates: u64, target: usize) -> bool {
    if target == 0 {
        return true;
    }
    if (candidates.count_ones() as usize) < target {
        return false;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    independent_at_least(adj, rest & !adj[v], target - 1) || independent_at_least(adj, rest, target)
}

/// Some `r` coordinates of the tuple are pairwise disjoint.
pub fn is_r_good(tuple: &[SubsetMask], r: usize) -> bool {
    assert!(tuple.len() <= 64, "tuples have at most 64 coordinates");
    let adj: Vec<u64> = tuple
        .iter()
        .enumerate()
        .map(|(i, a)| {
            tuple
                .iter()
                .enumerate()
                .filter(|&(j, b)| j != i && a.intersects(b))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    let all = if tuple.len() == 64 {
        u64::MAX
    } else {
        (1u64 << tuple.len()) - 1
    };
    independent_at_least(&adj, all, r)
}

/// Number of labeled forests on `d` vertices.
pub fn labeled_forests(d: usize) -> u128 {
    // f(n) = sum_k C(n-1, k-1) k^(k-2) f(n-k): the tree holding vertex 0 has k vertices.
    let mut f = vec![1u128; d + 1];
    for n in 1..=d {
        f[n] = (1..=n)
            .map(|k| {
                let trees = if k < 2 {
                    1
                } else {
                    (k as u128).pow(k as u32 - 2)
                };
                binomial(n as u64 - 1, k as u64 - 1) * trees * f[n - k]
            })
            .sum();
    }
    f[d]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RBadReport {
    pub ground_size: usize,
    pub a: usize,
    pub d: usize,
    pub r: usize,
    pub total_tuples: u128,
    pub exhaustive: bool,
    /// Exact count, or the sampled estimate when not exhaustive.
    pub bad: f64,
    pub samples: Option<u64>,
    /// Standard error of the sampled estimate.
    pub std_error: Option<f64>,
    pub forests: u128,
    /// `C(d) (a^2/|P|)^(d-r+1) C(|P|,a)^d`.
    pub bound: f64,
    pub holds: bool,
}

/// Largest tuple count enumerated exactly.
pub const EXACT_TUPLE_CAP: u128 = 10_000_000;

fn count_bad_exact(level: &[SubsetMask], d: usize, r: usize) -> u128 {
    fn rec(level: &[SubsetMask], tuple: &mut Vec<SubsetMask>, d: usize, r: usize) -> u128 {
        if tuple.len() == d {
            return u128::from(!is_r_good(tuple, r));
        }
        let mut total = 0;
        for s in level {
            tuple.push(*s);
            total += rec(level, tuple, d, r);
            tuple.pop();
        }
        total
    }
    level
        .par_iter()
        .map(|s| {
            let mut tuple = Vec::with_capacity(d);
            tuple.push(*s);
            rec(level, &mut tuple, d, r)
        })
        .sum()
}

/// Counts `d`-tuples of `a`-subsets of `0..ground_size` without `r` pairwise
/// disjoint coordinates, exactly when there are at most [`EXACT_TUPLE_CAP`]
/// tuples and otherwise from `samples` seeded uniform draws.
pub fn count_r_bad(
    ground_size: usize,
    a: usize,
    d: usize,
    r: usize,
    samples: u64,
    seed: u64,
) -> Result<RBadReport> {
    if a == 0 || a > ground_size || d == 0 || d > 64 {
        return Err(Error::invalid(format!(
            "need 1 <= a <= |P| and 1 <= d <= 64, got a={a}, |P|={ground_size}, d={d}"
        )));
    }
    let per = binomial(ground_size as u64, a as u64);
    let total = per.checked_pow(d as u32).unwrap_or(u128::MAX);
    let forests = labeled_forests(d);
    let bound = forests as f64
        * ((a * a) as f64 / ground_size as f64).powi(d as i32 - r as i32 + 1)
        * (per as f64).powi(d as i32);
    if total <= EXACT_TUPLE_CAP {
        let level: Vec<SubsetMask> = Combinations::new(ground_size, a)
            .map(SubsetMask::from_indices)
            .collect();
        let bad = count_bad_exact(&level, d, r) as f64;
        return Ok(RBadReport {
            ground_size,
            a,
            d,
            r,
            total_tuples: total,
            exhaustive: true,
            bad,
            samples: None,
            std_error: None,
            forests,
            bound,
            holds: bad <= bound,
        });
    }
    if samples == 0 {
        return Err(Error::ResourceLimit {
            what: "r-bad tuple enumeration",
            needed: total,
            cap: EXACT_TUPLE_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut tuple = Vec::with_capacity(d);
    for _ in 0..samples {
        tuple.clear();
        tuple.extend((0..d).map(|_| random_subset(&mut rng, ground_size, a)));
        if !is_r_good(&tuple, r) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let bad = p * total as f64;
    let std_error = (p * (1.0 - p) / samples as f64).sqrt() * total as f64;
    Ok(RBadReport {
        ground_size,
        a,
        d,
        r,
        total_tuples: total,
        exhaustive: false,
        bad,
        samples: Some(samples),
        std_error: Some(std_error),
        forests,
        bound,
        holds: bad <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix.iter().copied())
    }

    #[test]
    fn goodness_examples() {
        assert!(is_r_good(&[m(&[1, 2]), m(&[3, 4]), m(&[1, 3])], 2));
        assert!(!is_r_good(&[m(&[1, 2]), m(&[3, 4]), m(&[1, 3])], 3));
        // d = r: good iff all coordinates are pairwise disjoint.
        assert!(is_r_good(&[m(&[0]), m(&[1]), m(&[2])], 3));
        assert!(!is_r_good(&[m(&[0]), m(&[1]), m(&[1, 2])], 3));
    }

    #[test]
    fn forest_counts() {
        let got: Vec<u128> = (0..=6).map(labeled_forests).collect();
        assert_eq!(got, vec![1, 1, 2, 7, 38, 291, 2932]);
    }

    #[test]
    fn small_bad_count_is_exact() {
        let rep = count_r_bad(4, 2, 2, 2, 0, 0).unwrap();
        assert!(rep.exhaustive);
        // Oracle: ordered pairs of intersecting 2-subsets of a 4-set: 6*6 - 6 disjoint.
        assert_eq!(rep.bad, 30.0);
    }

    #[test]
    fn large_counts_need_samples() {
        assert!(count_r_bad(20, 3, 4, 2, 0, 1)
            .unwrap_err()
            .is_resource_limit());
        let rep = count_r_bad(20, 3, 4, 2, 2000, 1).unwrap();
        assert!(!rep.exhaustive && rep.samples == Some(2000));
    }
}
