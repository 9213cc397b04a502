//! Assignments in `{0,1}^n` and coordinate subsets of `[n]`.
//!
//! Coordinates are 1-indexed. Coordinate `i` lives at bit `i - 1` of the
//! backing words, so an assignment over `n <= 64` coordinates corresponds to
//! the integer whose bit `i - 1` is `x_i` (the truth-table index of `x`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitOr, BitOrAssign, BitXor, Not};

use rand::RngCore;
use smallvec::SmallVec;

use crate::error::{usage, Error, Result};

type Words = SmallVec<[u64; 2]>;

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A point of the Boolean cube `{0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    words: Words,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Self { n, words: SmallVec::from_elem(0, word_count(n)) }
    }

    pub fn ones(n: usize) -> Self {
        let mut a = Self { n, words: SmallVec::from_elem(u64::MAX, word_count(n)) };
        a.clear_tail();
        a
    }

    /// Builds an assignment from `bits[0] = x_1, bits[1] = x_2, ...`.
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut a = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                a.words[i / 64] |= 1 << (i % 64);
            }
        }
        a
    }

    /// The assignment whose bit `i - 1` of `index` gives `x_i`.
    ///
    /// # Panics
    /// If `n > 64`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 64, "from_index supports n <= 64, got {n}");
        let mut a = Self::zeros(n);
        if n > 0 {
            a.words[0] = index & tail_mask(n);
        }
        a
    }

    /// Inverse of [`Assignment::from_index`]; `None` when `n > 64`.
    pub fn to_index(&self) -> Option<u64> {
        match self.n {
            0 => Some(0),
            n if n <= 64 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Uniform sample from `{0,1}^n`.
    pub fn random(n: usize, rng: &mut (impl RngCore + ?Sized)) -> Self {
        let mut a = Self { n, words: (0..word_count(n)).map(|_| rng.next_u64()).collect() };
        a.clear_tail();
        a
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Value of coordinate `i` (1-indexed).
    ///
    /// # Panics
    /// If `i` is not in `1..=n`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "coordinate {i} outside [1, {}]", self.n);
        let b = i - 1;
        (self.words[b / 64] >> (b % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i >= 1 && i <= self.n, "coordinate {i} outside [1, {}]", self.n);
        let b = i - 1;
        if value {
            self.words[b / 64] |= 1 << (b % 64);
        } else {
            self.words[b / 64] &= !(1 << (b % 64));
        }
    }

    /// Copy with coordinate `i` flipped (`x ⊕ e_i`).
    pub fn flipped(&self, i: usize) -> Self {
        let mut a = self.clone();
        let v = a.get(i);
        a.set(i, !v);
        a
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Coordinates set to 1, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b + 1)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (1..=self.n).map(|i| self.get(i)).collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// `x_V ∘ y_{V̄}`: coordinates in `v` from `self`, the rest from `other`.
    ///
    /// # Panics
    /// If the arities of `self`, `other` and `v` differ. See [`splice`] for
    /// the checked form.
    pub fn splice(&self, other: &Assignment, v: &CoordSet) -> Assignment {
        assert_eq!(self.n, other.n, "splice of assignments with different arity");
        assert_eq!(self.n, v.universe(), "splice set over a different universe");
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .zip(v.mask.words.iter())
            .map(|((x, y), m)| (x & m) | (y & !m))
            .collect();
        Assignment { n: self.n, words }
    }

    /// Hex form: digit `j` holds coordinates `4j+1..=4j+4`, lowest coordinate
    /// in the lowest bit; digits are written in increasing `j`.
    pub fn to_hex(&self) -> String {
        nibbles_to_hex(self.n, |b| (self.words[b / 64] >> (b % 64)) & 1 == 1)
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let mut a = Self::zeros(n);
        hex_to_nibbles(n, s, |b| a.words[b / 64] |= 1 << (b % 64))?;
        Ok(a)
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }
}

/// Little-endian nibble encoding shared by assignments and truth tables.
pub(crate) fn nibbles_to_hex(len: usize, bit: impl Fn(usize) -> bool) -> String {
    let digits = len.div_ceil(4).max(1);
    (0..digits)
        .map(|d| {
            let v = (0..4).filter(|&k| d * 4 + k < len && bit(d * 4 + k)).fold(0u32, |acc, k| acc | (1 << k));
            char::from_digit(v, 16).unwrap()
        })
        .collect()
}

pub(crate) fn hex_to_nibbles(len: usize, s: &str, mut set: impl FnMut(usize)) -> Result<()> {
    let digits = len.div_ceil(4).max(1);
    if s.len() != digits {
        return Err(Error::Parse(format!("expected {digits} hex digits for {len} bits, found {}", s.len())));
    }
    for (d, c) in s.chars().enumerate() {
        let v = c.to_digit(16).ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
        for k in 0..4 {
            if v >> k & 1 == 1 {
                let b = d * 4 + k;
                if b >= len {
                    return Err(Error::Parse(format!("bit {b} set beyond length {len}")));
                }
                set(b);
            }
        }
    }
    Ok(())
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (1..=self.n).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "Assignment({s})")
    }
}

impl fmt::Display for Assignment {
    /// Coordinates left to right: `x_1 x_2 ... x_n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl BitXor for &Assignment {
    type Output = Assignment;

    fn bitxor(self, rhs: &Assignment) -> Assignment {
        assert_eq!(self.n, rhs.n, "xor of assignments with different arity");
        let words = self.words.iter().zip(rhs.words.iter()).map(|(a, b)| a ^ b).collect();
        Assignment { n: self.n, words }
    }
}

impl BitAnd for &Assignment {
    type Output = Assignment;

    fn bitand(self, rhs: &Assignment) -> Assignment {
        assert_eq!(self.n, rhs.n, "and of assignments with different arity");
        let words = self.words.iter().zip(rhs.words.iter()).map(|(a, b)| a & b).collect();
        Assignment { n: self.n, words }
    }
}

impl BitOr for &Assignment {
    type Output = Assignment;

    fn bitor(self, rhs: &Assignment) -> Assignment {
        let mut a = self.clone();
        a |= rhs;
        a
    }
}

impl BitOrAssign<&Assignment> for Assignment {
    fn bitor_assign(&mut self, rhs: &Assignment) {
        assert_eq!(self.n, rhs.n, "or of assignments with different arity");
        for (a, b) in self.words.iter_mut().zip(rhs.words.iter()) {
            *a |= b;
        }
    }
}

impl Not for &Assignment {
    type Output = Assignment;

    fn not(self) -> Assignment {
        let mut a = Assignment { n: self.n, words: self.words.iter().map(|w| !w).collect() };
        a.clear_tail();
        a
    }
}

/// Checked `x_V ∘ y_{V̄}`.
pub fn splice(x: &Assignment, y: &Assignment, v: &CoordSet) -> Result<Assignment> {
    if x.len() != y.len() || x.len() != v.universe() {
        return usage(format!("splice arity mismatch: x has {}, y has {}, V over {}", x.len(), y.len(), v.universe()));
    }
    Ok(x.splice(y, v))
}

/// A subset of `[n]`, stored as a bit mask over the universe `[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoordSet {
    mask: Assignment,
}

impl CoordSet {
    pub fn empty(n: usize) -> Self {
        Self { mask: Assignment::zeros(n) }
    }

    pub fn full(n: usize) -> Self {
        Self { mask: Assignment::ones(n) }
    }

    pub fn from_coords(n: usize, coords: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in coords {
            if i == 0 || i > n {
                return usage(format!("coordinate {i} outside [1, {n}]"));
            }
            s.mask.set(i, true);
        }
        Ok(s)
    }

    pub fn from_mask(mask: Assignment) -> Self {
        Self { mask }
    }

    /// Size of the universe `[n]` this set lives in.
    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.universe() && self.mask.get(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.mask.set(i, true);
    }

    pub fn remove(&mut self, i: usize) {
        self.mask.set(i, false);
    }

    pub fn len(&self) -> usize {
        self.mask.weight()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.words().iter().all(|&w| w == 0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.ones_iter()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        Self { mask: !&self.mask }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { mask: &self.mask | &other.mask }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self { mask: &self.mask & &other.mask }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self { mask: &self.mask & &!&other.mask }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// The indicator vector of the set.
    /// Whether `x` is 1 on every member.
    pub fn all_ones_in(&self, x: &Assignment) -> bool {
        self.mask.words.iter().zip(x.words.iter()).all(|(m, w)| m & !w == 0)
    }

    /// Whether `x` is 0 on every member.
    pub fn all_zeros_in(&self, x: &Assignment) -> bool {
        self.mask.words.iter().zip(x.words.iter()).all(|(m, w)| m & w == 0)
    }

    pub fn mask(&self) -> &Assignment {
        &self.mask
    }

    /// Parses a comma-separated coordinate list (`""` is the empty set).
    pub fn parse_list(n: usize, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty(n));
        }
        let coords = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad coordinate {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coords(n, coords).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl PartialOrd for CoordSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoordSet {
    /// Lexicographic on the ascending member lists, then by universe size.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter()).then(self.universe().cmp(&other.universe()))
    }
}

impl fmt::Debug for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl fmt::Display for CoordSet {
    /// Comma-separated ascending members, e.g. `1,3,7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}
