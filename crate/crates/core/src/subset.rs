//! Subsets of the message index set `[n]`, stored as bit masks.
//!
//! Bit `k` of the mask stands for message `k + 1`; all public text formats are
//! 1-based while the library works 0-based internally. The mask value of a
//! server subset `J` doubles as the server index.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest message count a [`Subset`] can address.
pub const MAX_MESSAGES: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_mask(mask: u32) -> Self {
        Subset(mask)
    }

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_MESSAGES);
        Subset(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Subset(indices.into_iter().fold(0, |m, i| m | (1 << i)))
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    /// Complement relative to `[n]`.
    pub fn complement(self, n: usize) -> Subset {
        Subset::full(n).difference(self)
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    /// Member indices, ascending, 0-based.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self` including the empty set, in increasing mask order.
    pub fn subsets(self) -> Submasks {
        Submasks {
            of: self.0,
            next: Some(0),
        }
    }

    /// Every nonempty subset of `self`, in increasing mask order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = Subset> {
        self.subsets().skip(1)
    }

    /// Apply a relabeling of messages: member `i` maps to `perm[i]`.
    pub fn permute(self, perm: &[usize]) -> Subset {
        Subset::from_indices(self.iter().map(|i| perm[i]))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Renders 1-based, e.g. `{1,3}`; the empty set is `{}`.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug)]
pub struct Members(u32);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Members {}

/// Ascending enumeration of submasks via `(s - of) & of`.
#[derive(Clone, Debug)]
pub struct Submasks {
    of: u32,
    next: Option<u32>,
}

impl Iterator for Submasks {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        self.next = if cur == self.of {
            None
        } else {
            Some(cur.wrapping_sub(self.of) & self.of)
        };
        Some(Subset(cur))
    }
}

/// All nonempty subsets of `[n]`, i.e. the server index set `N`, ascending by mask.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = Subset> {
    Subset::full(n).nonempty_subsets()
}
