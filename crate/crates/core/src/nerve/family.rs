use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::SubsetMask;

/// An up-closed family of subsets of `P = {0, …, ground_size-1}`, stored as
/// its antichain of minimal members.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UpFamily {
    ground_size: usize,
    min_sets: Vec<SubsetMask>,
}

impl fmt::Debug for UpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "up")?;
        f.debug_set().entries(self.min_sets.iter()).finish()
    }
}

/// Reduces a list of sets to its inclusion-minimal members, sorted.
pub fn minimal_antichain(sets: &[SubsetMask]) -> Vec<SubsetMask> {
    let mut by_size: Vec<SubsetMask> = sets.to_vec();
    by_size.sort_unstable_by_key(|s| (s.len(), *s));
    by_size.dedup();
    let mut kept: Vec<SubsetMask> = Vec::new();
    for s in by_size {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept.sort_unstable();
    kept
}

/// The family of all supersets (within `P`) of the given sets.
pub fn up_closure(sets: &[SubsetMask], ground_size: usize) -> Result<UpFamily> {
    if let Some(bad) = sets.iter().find(|s| !s.fits(ground_size)) {
        return Err(Error::invalid(format!(
            "set {bad} does not fit |P|={ground_size}"
        )));
    }
    Ok(UpFamily {
        ground_size,
        min_sets: minimal_antichain(sets),
    })
}

impl UpFamily {
    /// The empty family (no members).
    pub fn empty(ground_size: usize) -> Self {
        UpFamily {
            ground_size,
            min_sets: Vec::new(),
        }
    }

    /// `F(p)`: every subset containing `p`.
    pub fn point(ground_size: usize, p: usize) -> Self {
        UpFamily {
            ground_size,
            min_sets: vec![SubsetMask::singleton(p)],
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn min_sets(&self) -> &[SubsetMask] {
        &self.min_sets
    }

    pub fn is_empty(&self) -> bool {
        self.min_sets.is_empty()
    }

    /// Membership: some minimal set is contained in `set`.
    pub fn contains(&self, set: &SubsetMask) -> bool {
        self.min_sets.iter().any(|m| m.is_subset(set))
    }

    /// Family inclusion `self ⊆ other`.
    pub fn is_subfamily_of(&self, other: &UpFamily) -> bool {
        self.min_sets.iter().all(|m| other.contains(m))
    }

    /// `up(A) ∩ up(B) = up{a ∪ b}`.
    pub fn intersect(&self, other: &UpFamily) -> UpFamily {
        let mut joins = Vec::with_capacity(self.min_sets.len() * other.min_sets.len());
        for a in &self.min_sets {
            for b in &other.min_sets {
                joins.push(*a | *b);
            }
        }
        UpFamily {
            ground_size: self.ground_size,
            min_sets: minimal_antichain(&joins),
        }
    }

    /// `up(A) ∪ up(B) = up(A ∪ B)`.
    pub fn union(&self, other: &UpFamily) -> UpFamily {
        let mut all = self.min_sets.clone();
        all.extend_from_slice(&other.min_sets);
        UpFamily {
            ground_size: self.ground_size,
            min_sets: minimal_antichain(&all),
        }
    }

    /// Members of size exactly two.
    pub fn pairs(&self) -> Vec<SubsetMask> {
        let mut out = Vec::new();
        for a in 0..self.ground_size {
            for b in a + 1..self.ground_size {
                let s = SubsetMask::from_indices([a, b]);
                if self.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Image under a permutation of `P` (`perm[i]` is the image of `i`).
    pub fn permuted(&self, perm: &[usize]) -> UpFamily {
        let mapped: Vec<SubsetMask> = self
            .min_sets
            .iter()
            .map(|s| s.iter().map(|i| perm[i]).collect())
            .collect();
        let mut min_sets = mapped;
        min_sets.sort_unstable();
        UpFamily {
            ground_size: self.ground_size,
            min_sets,
        }
    }

    pub fn to_bits(&self) -> FamilyBits {
        FamilyBits::from_min_sets(self.ground_size, &self.min_sets)
    }
}

/// An up-closed family as a bit vector over the `2^|P|` subsets of `P`,
/// subset `s` being bit number `s` (its mask read as an integer).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FamilyBits {
    ground_size: usize,
    words: Vec<u64>,
}

impl fmt::Debug for FamilyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FamilyBits({:?})", self.to_family())
    }
}

pub(crate) fn words_for(ground_size: usize) -> usize {
    ((1usize << ground_size) / 64).max(1)
}

impl FamilyBits {
    pub fn empty(ground_size: usize) -> Self {
        FamilyBits {
            ground_size,
            words: vec![0; words_for(ground_size)],
        }
    }

    pub fn from_min_sets(ground_size: usize, min_sets: &[SubsetMask]) -> Self {
        let mut f = FamilyBits::empty(ground_size);
        for m in min_sets {
            f.insert(m.low_bits() as usize);
        }
        f.close_upward();
        f
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains_index(&self, s: usize) -> bool {
        self.words[s / 64] >> (s % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, s: usize) {
        self.words[s / 64] |= 1 << (s % 64);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &FamilyBits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Adds every superset of every member.
    pub fn close_upward(&mut self) {
        let size = 1usize << self.ground_size;
        for i in 0..self.ground_size {
            let bit = 1usize << i;
            for s in 0..size {
                if s & bit == 0 && self.contains_index(s) {
                    self.insert(s | bit);
                }
            }
        }
    }

    /// Minimal members of an up-closed bit family.
    pub fn minimal_sets(&self) -> Vec<SubsetMask> {
        let size = 1usize << self.ground_size;
        (0..size)
            .filter(|&s| {
                self.contains_index(s)
                    && (0..self.ground_size)
                        .all(|i| s >> i & 1 == 0 || !self.contains_index(s & !(1 << i)))
            })
            .map(|s| SubsetMask::from_bits(s as u64))
            .collect()
    }

    pub fn to_family(&self) -> UpFamily {
        UpFamily {
            ground_size: self.ground_size,
            min_sets: self.minimal_sets(),
        }
    }
}
