//! Finite subsets of an integer interval `[1, U]`, stored as bit vectors.
//!
//! Bit `x` of the backing words holds membership of the element `x` itself
//! (bit 0 is unused), so shifting a whole vector left by `s` maps every
//! element `x` to `x + s`. Sumsets are therefore computed by OR-ing shifted
//! copies of one operand, one shift per element of the other.

use std::fmt;

use crate::error::Error;

const WORD_BITS: usize = 64;

/// A finite subset of `[1, universe_max]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntSet {
    universe_max: usize,
    words: Vec<u64>,
}

/// Common difference reported for arithmetic progressions.
///
/// A singleton is compatible with every difference, so it gets its own
/// marker instead of an arbitrary number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApDifference {
    /// Singleton set: compatible with any difference.
    Any,
    /// Two or more elements with this common difference (`>= 1`).
    Fixed(usize),
}

impl ApDifference {
    /// Whether two reported differences are compatible, treating `Any` as a
    /// wildcard.
    pub fn matches(self, other: ApDifference) -> bool {
        match (self, other) {
            (ApDifference::Any, _) | (_, ApDifference::Any) => true,
            (ApDifference::Fixed(a), ApDifference::Fixed(b)) => a == b,
        }
    }
}

fn words_for(universe_max: usize) -> usize {
    (universe_max + 1).div_ceil(WORD_BITS)
}

impl IntSet {
    /// The empty set over `[1, universe_max]`.
    pub fn empty(universe_max: usize) -> IntSet {
        assert!(universe_max >= 1, "universe must contain at least one position");
        IntSet { universe_max, words: vec![0; words_for(universe_max)] }
    }

    /// The set containing exactly the given elements; duplicates collapse.
    pub fn from_elements(universe_max: usize, elements: &[usize]) -> Result<IntSet, Error> {
        let mut set = IntSet::empty(universe_max);
        for &x in elements {
            if x < 1 || x > universe_max {
                return Err(Error::ElementOutOfRange { value: x, universe_max });
            }
            set.set_bit(x);
        }
        Ok(set)
    }

    /// The interval `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(universe_max: usize, lo: usize, hi: usize) -> Result<IntSet, Error> {
        if lo < 1 {
            return Err(Error::ElementOutOfRange { value: lo, universe_max });
        }
        if hi > universe_max {
            return Err(Error::ElementOutOfRange { value: hi, universe_max });
        }
        let mut set = IntSet::empty(universe_max);
        for x in lo..=hi {
            set.set_bit(x);
        }
        Ok(set)
    }

    /// The suffix interval `[t, universe_max]`.
    pub fn suffix(universe_max: usize, t: usize) -> Result<IntSet, Error> {
        IntSet::interval(universe_max, t, universe_max)
    }

    /// The full interval `[1, universe_max]`.
    pub fn full(universe_max: usize) -> IntSet {
        IntSet::interval(universe_max, 1, universe_max).expect("full interval is always in range")
    }

    pub fn universe_max(&self) -> usize {
        self.universe_max
    }

    pub fn contains(&self, x: usize) -> bool {
        if x < 1 || x > self.universe_max {
            return false;
        }
        self.words[x / WORD_BITS] >> (x % WORD_BITS) & 1 != 0
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn min_element(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn max_element(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(i * WORD_BITS + (WORD_BITS - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD_BITS + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Whether every element of `other` is an element of `self`.
    pub fn is_superset_of(&self, other: &IntSet) -> bool {
        for (i, &w) in other.words.iter().enumerate() {
            let own = self.words.get(i).copied().unwrap_or(0);
            if w & !own != 0 {
                return false;
            }
        }
        true
    }

    /// Whether the two sets share an element.
    pub fn intersects(&self, other: &IntSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Smallest element common to both sets.
    pub fn first_common(&self, other: &IntSet) -> Option<usize> {
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let w = a & b;
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// The sumset `{a + b : a in self, b in other}` over `[1, U1 + U2]`.
    pub fn sumset(&self, other: &IntSet) -> IntSet {
        let mut out = IntSet::empty(self.universe_max + other.universe_max);
        // Shift the larger operand once per element of the smaller one.
        let (base, shifts) =
            if self.len() >= other.len() { (self, other) } else { (other, self) };
        for x in shifts.iter() {
            out.or_shifted(base, x);
        }
        out
    }

    /// `Some(t)` iff the set is exactly the suffix interval `[t, universe_max]`.
    pub fn suffix_interval(&self) -> Option<usize> {
        let t = self.min_element()?;
        if self.max_element() == Some(self.universe_max) && self.len() == self.universe_max - t + 1
        {
            Some(t)
        } else {
            None
        }
    }

    /// The common difference if the set is an arithmetic progression.
    ///
    /// Returns `Ok(None)` for sets with unequal gaps and an error for the
    /// empty set.
    pub fn arith_progression(&self) -> Result<Option<ApDifference>, Error> {
        let mut it = self.iter();
        let first = it.next().ok_or(Error::EmptySetInput("arith_progression"))?;
        let second = match it.next() {
            None => return Ok(Some(ApDifference::Any)),
            Some(x) => x,
        };
        let d = second - first;
        let mut prev = second;
        for x in it {
            if x - prev != d {
                return Ok(None);
            }
            prev = x;
        }
        Ok(Some(ApDifference::Fixed(d)))
    }

    pub(crate) fn set_bit(&mut self, x: usize) {
        debug_assert!(x >= 1 && x <= self.universe_max);
        self.words[x / WORD_BITS] |= 1 << (x % WORD_BITS);
    }

    pub(crate) fn clear_bit(&mut self, x: usize) {
        debug_assert!(x >= 1 && x <= self.universe_max);
        self.words[x / WORD_BITS] &= !(1 << (x % WORD_BITS));
    }

    pub(crate) fn clear_all(&mut self) {
        self.words.fill(0);
    }

    /// Overwrite a single-word set wholesale; all bits must fall in the
    /// universe (bit 0 stays unused).
    pub(crate) fn set_single_word(&mut self, word: u64) {
        debug_assert_eq!(self.words.len(), 1);
        debug_assert_eq!(word & 1, 0);
        debug_assert!(
            self.universe_max == WORD_BITS - 1 || word >> (self.universe_max + 1) == 0
        );
        self.words[0] = word;
    }

    /// Overwrite with the contents of `src` (universes need not match; `src`
    /// must fit).
    pub(crate) fn copy_from(&mut self, src: &IntSet) {
        debug_assert!(src.universe_max <= self.universe_max);
        let n = src.words.len();
        self.words[..n].copy_from_slice(&src.words);
        self.words[n..].fill(0);
    }

    /// `self |= src << shift`, i.e. add a translated copy of `src`.
    pub(crate) fn or_shifted(&mut self, src: &IntSet, shift: usize) {
        debug_assert!(src.universe_max + shift <= self.universe_max);
        let word_shift = shift / WORD_BITS;
        let bit_shift = shift % WORD_BITS;
        if bit_shift == 0 {
            for (i, &w) in src.words.iter().enumerate() {
                self.words[i + word_shift] |= w;
            }
        } else {
            for (i, &w) in src.words.iter().enumerate() {
                self.words[i + word_shift] |= w << bit_shift;
                let carry = w >> (WORD_BITS - bit_shift);
                if carry != 0 {
                    self.words[i + word_shift + 1] |= carry;
                }
            }
        }
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}/[1,{}]", self.universe_max)
    }
}
