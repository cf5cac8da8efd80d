//! Fixed-width bit vectors packed into machine words.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

const WORD: usize = 64;

/// A bit vector of a fixed width. Bits beyond `width` are always zero, so
/// derived equality, ordering and hashing only see the first `width` bits.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitVector {
    width: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(width: usize) -> Self {
        Self {
            width,
            words: vec![0; width.div_ceil(WORD)],
        }
    }

    pub fn ones(width: usize) -> Self {
        let mut v = Self::zeros(width);
        for q in 0..width {
            v.set(q, true);
        }
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (q, &b) in bits.iter().enumerate() {
            v.set(q, b);
        }
        v
    }

    /// Builds a vector of `width` bits with exactly the listed positions set.
    pub fn from_ones(width: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(width);
        for &q in ones {
            v.set(q, true);
        }
        v
    }

    /// The standard basis vector `e_q`.
    pub fn unit(width: usize, q: usize) -> Self {
        Self::from_ones(width, &[q])
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, q: usize) -> bool {
        assert!(
            q < self.width,
            "bit {q} out of range for width {}",
            self.width
        );
        self.words[q / WORD] >> (q % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, q: usize, value: bool) {
        assert!(
            q < self.width,
            "bit {q} out of range for width {}",
            self.width
        );
        let mask = 1u64 << (q % WORD);
        if value {
            self.words[q / WORD] |= mask;
        } else {
            self.words[q / WORD] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(0/1) integers: the number of shared set bits.
    /// Callers must check widths first; mismatched words are truncated.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> usize {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Positions of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(move |&q| self.get(q))
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width).map(|q| self.get(q)).collect()
    }

    /// A new vector with `extra` bits of value `fill` appended after the
    /// existing ones.
    pub fn extended(&self, extra: usize, fill: bool) -> Self {
        let mut v = Self::zeros(self.width + extra);
        for q in self.iter_ones() {
            v.set(q, true);
        }
        if fill {
            for q in self.width..self.width + extra {
                v.set(q, true);
            }
        }
        v
    }

    /// Reorders coordinates: bit `q` of `self` lands at `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.width);
        let mut v = Self::zeros(self.width);
        for q in self.iter_ones() {
            v.set(perm[q], true);
        }
        v
    }
}

/// Renders as a 0/1 string, bit 0 first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.width {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}
