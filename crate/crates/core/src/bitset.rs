use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Widths beyond this are rejected everywhere; subsets are packed into `u32`.
pub const MAX_WIDTH: usize = 32;

/// Default cap for full powerset enumeration.
pub const POWERSET_CAP: usize = 20;

/// Subset of `{0, .., width-1}` packed into a machine word.
///
/// Used for atom images of semilattice maps, for component sets of compact
/// ideals, and for the powerset index of the generic construction. The
/// canonical enumeration order everywhere is binary-counter order with bit 0
/// as element 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitSet {
    width: usize,
    bits: u32,
}

impl BitSet {
    pub fn empty(width: usize) -> Self {
        assert!(width <= MAX_WIDTH, "bitset width {width} exceeds {MAX_WIDTH}");
        BitSet { width, bits: 0 }
    }

    pub fn full(width: usize) -> Self {
        assert!(width <= MAX_WIDTH);
        let bits = if width == 32 { u32::MAX } else { (1u32 << width) - 1 };
        BitSet { width, bits }
    }

    pub fn singleton(width: usize, i: usize) -> Self {
        BitSet::empty(width).with(i)
    }

    pub fn from_indices(width: usize, indices: &[usize]) -> Self {
        let mut s = BitSet::empty(width);
        for &i in indices {
            s = s.with(i);
        }
        s
    }

    /// Subset with the given packed bits; positions `≥ width` must be clear.
    pub fn from_bits(width: usize, bits: u32) -> Self {
        let s = BitSet { width, bits };
        debug_assert!(width == 32 || bits < (1u32 << width));
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.bits >> i & 1 == 1
    }

    pub fn with(&self, i: usize) -> Self {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        BitSet {
            width: self.width,
            bits: self.bits | 1 << i,
        }
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.width, other.width);
        BitSet {
            width: self.width,
            bits: self.bits | other.bits,
        }
    }

    pub fn inter(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.width, other.width);
        BitSet {
            width: self.width,
            bits: self.bits & other.bits,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        assert_eq!(self.width, other.width);
        self.bits & !other.bits == 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.width).filter(move |i| bits >> i & 1 == 1)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// All `2^width` subsets in binary-counter order (`∅, {0}, {1}, {0,1}, ...`).
pub fn powerset(width: usize) -> Result<Vec<BitSet>> {
    powerset_capped(width, POWERSET_CAP)
}

pub fn powerset_capped(width: usize, cap: usize) -> Result<Vec<BitSet>> {
    if width > cap {
        return Err(Error::Resource(format!(
            "powerset width {width} exceeds cap {cap}"
        )));
    }
    Ok((0u64..1 << width)
        .map(|bits| BitSet::from_bits(width, bits as u32))
        .collect())
}
