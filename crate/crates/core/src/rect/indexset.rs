use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A set of row or column indices.
///
/// Sets whose indices all lie below 64 are held as a bitmask; anything
/// larger is a sorted, deduplicated index vector. The representation is
/// canonical, so derived equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum IndexSet {
    Mask(u64),
    Sorted(Vec<usize>),
}

impl IndexSet {
    pub fn empty() -> IndexSet {
        IndexSet::Mask(0)
    }

    pub fn from_mask(mask: u64) -> IndexSet {
        IndexSet::Mask(mask)
    }

    /// `0..n`.
    pub fn full(n: usize) -> IndexSet {
        IndexSet::from_indices(0..n)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> IndexSet {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.last().is_none_or(|&m| m < 64) {
            IndexSet::Mask(v.iter().fold(0, |m, &i| m | (1u64 << i)))
        } else {
            IndexSet::Sorted(v)
        }
    }

    pub fn mask(&self) -> Option<u64> {
        match self {
            IndexSet::Mask(m) => Some(*m),
            IndexSet::Sorted(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            IndexSet::Mask(m) => m.count_ones() as usize,
            IndexSet::Sorted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        match self {
            IndexSet::Mask(m) => i < 64 && (m >> i) & 1 == 1,
            IndexSet::Sorted(v) => v.binary_search(&i).is_ok(),
        }
    }

    pub fn last(&self) -> Option<usize> {
        match self {
            IndexSet::Mask(0) => None,
            IndexSet::Mask(m) => Some(63 - m.leading_zeros() as usize),
            IndexSet::Sorted(v) => v.last().copied(),
        }
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match self {
            IndexSet::Mask(m) => Box::new(MaskIter(*m)),
            IndexSet::Sorted(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        match (self, other) {
            (IndexSet::Mask(a), IndexSet::Mask(b)) => a & !b == 0,
            _ => self.iter().all(|i| other.contains(i)),
        }
    }
}

/// Iterates the set bits of a mask, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct MaskIter(pub u64);

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl Ord for IndexSet {
    /// Lexicographic on the increasing index sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<usize>::deserialize(d).map(IndexSet::from_indices)
    }
}
