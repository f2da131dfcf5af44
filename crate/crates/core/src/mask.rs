//! Fixed-width subsets of an indexed ground set `0..n`.
//!
//! A [`SubsetMask`] is four machine words wide, so every ground set handled by
//! this crate has at most [`MAX_POINTS`] elements. Masks order numerically
//! (bit `i` has weight `2^i`), which is the order used for canonical lists.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not, Sub};

use crate::error::{Error, Result};

pub const WORDS: usize = 4;
pub const MAX_POINTS: usize = 64 * WORDS;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SubsetMask {
    words: [u64; WORDS],
}

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask { words: [0; WORDS] };

    pub fn empty() -> Self {
        Self::EMPTY
    }

    /// The full ground set `{0, …, n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(
            n <= MAX_POINTS,
            "ground set of {n} points exceeds {MAX_POINTS}"
        );
        let mut words = [0u64; WORDS];
        for (w, word) in words.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        SubsetMask { words }
    }

    pub fn singleton(i: usize) -> Self {
        let mut m = Self::EMPTY;
        m.insert(i);
        m
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut m = Self::EMPTY;
        for i in indices {
            m.insert(i);
        }
        m
    }

    /// Mask whose low word is `bits`.
    pub fn from_bits(bits: u64) -> Self {
        let mut words = [0u64; WORDS];
        words[0] = bits;
        SubsetMask { words }
    }

    /// Low 64 bits; exact for ground sets of at most 64 points.
    #[inline]
    pub fn low_bits(&self) -> u64 {
        self.words[0]
    }

    #[inline]
    pub fn words(&self) -> &[u64; WORDS] {
        &self.words
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_POINTS, "index {i} out of range");
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < MAX_POINTS && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &SubsetMask) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &SubsetMask) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &SubsetMask) -> bool {
        !self.is_disjoint(other)
    }

    /// Complement relative to the ground set `0..n`.
    pub fn complement(&self, n: usize) -> Self {
        !*self & SubsetMask::full(n)
    }

    /// True if no bit at index `>= n` is set.
    pub fn fits(&self, n: usize) -> bool {
        n >= MAX_POINTS || self.is_subset(&SubsetMask::full(n))
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Largest element, if any.
    pub fn last(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> Elements {
        Elements {
            words: self.words,
            word: 0,
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lowercase hexadecimal, most significant digit first, exactly
    /// `ceil(n/4)` digits.
    pub fn to_hex(&self, n: usize) -> String {
        let digits = n.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let nibble = (self.words[bit / 64] >> (bit % 64)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(s: &str, n: usize) -> Result<Self> {
        let digits = n.div_ceil(4);
        if s.len() != digits {
            return Err(Error::Parse(format!(
                "mask {s:?} has {} hex digits, expected {digits} for n={n}",
                s.len()
            )));
        }
        if n > MAX_POINTS {
            return Err(Error::Parse(format!("n={n} exceeds {MAX_POINTS} points")));
        }
        let mut m = SubsetMask::EMPTY;
        for (pos, ch) in s.chars().rev().enumerate() {
            if ch.is_ascii_uppercase() {
                return Err(Error::Parse(format!("mask {s:?} must be lowercase hex")));
            }
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("mask {s:?}: bad hex digit {ch:?}")))?
                as u64;
            let bit = pos * 4;
            m.words[bit / 64] |= v << (bit % 64);
        }
        if !m.fits(n) {
            return Err(Error::Parse(format!("mask {s:?} sets bits beyond n={n}")));
        }
        Ok(m)
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl BitAnd for SubsetMask {
    type Output = SubsetMask;
    #[inline]
    fn bitand(mut self, rhs: SubsetMask) -> SubsetMask {
        self &= rhs;
        self
    }
}

impl BitAndAssign for SubsetMask {
    #[inline]
    fn bitand_assign(&mut self, rhs: SubsetMask) {
        for (a, b) in self.words.iter_mut().zip(rhs.words) {
            *a &= b;
        }
    }
}

impl BitOr for SubsetMask {
    type Output = SubsetMask;
    #[inline]
    fn bitor(mut self, rhs: SubsetMask) -> SubsetMask {
        self |= rhs;
        self
    }
}

impl BitOrAssign for SubsetMask {
    #[inline]
    fn bitor_assign(&mut self, rhs: SubsetMask) {
        for (a, b) in self.words.iter_mut().zip(rhs.words) {
            *a |= b;
        }
    }
}

impl Sub for SubsetMask {
    type Output = SubsetMask;
    #[inline]
    fn sub(mut self, rhs: SubsetMask) -> SubsetMask {
        for (a, b) in self.words.iter_mut().zip(rhs.words) {
            *a &= !b;
        }
        self
    }
}

impl Not for SubsetMask {
    type Output = SubsetMask;
    fn not(mut self) -> SubsetMask {
        for w in self.words.iter_mut() {
            *w = !*w;
        }
        self
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Reports list masks as ascending index arrays.
impl serde::Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> serde::Deserialize<'de> for SubsetMask {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!(
                "index {bad} out of range"
            )));
        }
        Ok(SubsetMask::from_indices(indices))
    }
}

impl FromIterator<usize> for SubsetMask {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SubsetMask::from_indices(iter)
    }
}

/// Ascending iterator over the elements of a mask.
pub struct Elements {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + w.trailing_zeros() as usize);
            }
            self.word += 1;
        }
        None
    }
}

/// Lexicographic iterator over `k`-element index combinations of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }

    /// Combinations whose first element is `first`, in lexicographic order.
    pub fn starting_with(n: usize, k: usize, first: usize) -> Self {
        if k == 0 || first + k > n {
            return Combinations {
                n,
                idx: Vec::new(),
                done: true,
            };
        }
        Combinations {
            n,
            idx: (first..first + k).collect(),
            done: false,
        }
    }

    /// Advances the cursor; returns false when exhausted. Keeps `idx[0]` fixed
    /// when `pinned` is set.
    fn advance(&mut self, pinned: bool) -> bool {
        let k = self.idx.len();
        let floor = usize::from(pinned);
        let mut i = k;
        while i > floor {
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        if !self.advance(false) {
            self.done = true;
        }
        Some(out)
    }
}

/// Visits every `k`-subset of `0..n` whose smallest element is `first`, as a
/// mask, stopping early when `visit` returns `Some`.
pub fn find_in_combinations_from<T>(
    n: usize,
    k: usize,
    first: usize,
    mut visit: impl FnMut(&[usize], SubsetMask) -> Option<T>,
) -> Option<T> {
    let mut c = Combinations::starting_with(n, k, first);
    if c.done {
        return None;
    }
    loop {
        let mask = SubsetMask::from_indices(c.idx.iter().copied());
        if let Some(found) = visit(&c.idx, mask) {
            return Some(found);
        }
        if !c.advance(true) {
            return None;
        }
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All set partitions of `0..r` into exactly `t` non-empty blocks, each block
/// a bit mask over `0..r`, in restricted-growth order. Blocks are listed by
/// their smallest element.
pub fn set_partitions(r: usize, t: usize) -> Vec<Vec<u32>> {
    fn rec(i: usize, r: usize, t: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if r - i < t - blocks.len() {
            return;
        }
        if i == r {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, r, t, blocks, out);
            blocks[b] &= !(1 << i);
        }
        if blocks.len() < t {
            blocks.push(1 << i);
            rec(i + 1, r, t, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    if t == 0 || t > r || r > 32 {
        return out;
    }
    rec(0, r, t, &mut Vec::with_capacity(t), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip_fixed_width() {
        let m = SubsetMask::from_indices([0, 2, 9]);
        assert_eq!(m.to_hex(10), "205");
        assert_eq!(SubsetMask::from_hex("205", 10).unwrap(), m);
        assert_eq!(SubsetMask::empty().to_hex(5), "00");
        assert!(SubsetMask::from_hex("205", 9).is_err());
        assert!(SubsetMask::from_hex("4", 2).is_err());
        assert!(SubsetMask::from_hex("A", 4).is_err());
    }

    #[test]
    fn wide_masks() {
        let m = SubsetMask::from_indices([3, 70, 139]);
        assert_eq!(m.len(), 3);
        assert_eq!(m.first(), Some(3));
        assert_eq!(m.last(), Some(139));
        assert_eq!(m.to_vec(), vec![3, 70, 139]);
        assert!(m.fits(140));
        assert!(!m.fits(139));
        assert_eq!(SubsetMask::from_hex(&m.to_hex(140), 140).unwrap(), m);
        assert_eq!(SubsetMask::full(140).len(), 140);
        assert_eq!(m.complement(140).len(), 137);
    }

    #[test]
    fn numeric_order() {
        let a = SubsetMask::from_indices([0, 1]);
        let b = SubsetMask::from_indices([2]);
        let c = SubsetMask::from_indices([64]);
        assert!(a < b && b < c);
    }

    #[test]
    fn combinations_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        let mut seen = Vec::new();
        for first in 0..5 {
            find_in_combinations_from(5, 3, first, |idx, _| {
                seen.push(idx.to_vec());
                None::<()>
            });
        }
        assert_eq!(seen, Combinations::new(5, 3).collect::<Vec<_>>());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(136, 4), 13_633_830);
        assert_eq!(binomial(140, 4), 15_329_615);
        assert_eq!(binomial(5, 7), 0);
    }

    #[test]
    fn set_partition_counts_are_stirling_numbers() {
        assert_eq!(set_partitions(4, 2).len(), 7);
        assert_eq!(set_partitions(5, 3).len(), 25);
        assert_eq!(set_partitions(3, 3), vec![vec![1, 2, 4]]);
        assert!(set_partitions(2, 3).is_empty());
    }
}
