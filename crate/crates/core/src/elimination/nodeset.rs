use std::fmt;

use serde::{Deserialize, Serialize};

/// Strictly increasing set of nonnegative integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(Vec<u64>);

pub fn is_power_of_two(x: u64) -> bool {
    x.is_power_of_two()
}

/// A nonzero element that is not a power of two.
pub fn is_intruder(x: u64) -> bool {
    x != 0 && !x.is_power_of_two()
}

impl NodeSet {
    /// Sorts and deduplicates.
    pub fn from_unsorted(mut elements: Vec<u64>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        NodeSet(elements)
    }

    /// `None` unless `elements` is strictly increasing.
    pub fn from_sorted(elements: Vec<u64>) -> Option<Self> {
        elements.windows(2).all(|w| w[0] < w[1]).then_some(NodeSet(elements))
    }

    /// `{lo, lo + 1, ..., hi}`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        NodeSet((lo..=hi).collect())
    }

    /// `{0, 1, 2, 4, ..., 2^(n-1)}`.
    pub fn geometric(n: usize) -> Self {
        NodeSet(std::iter::once(0).chain((0..n as u32).map(|k| 1u64 << k)).collect())
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn largest(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// `self ∪ other ∖ {removed}`.
    pub fn union_without(&self, other: &NodeSet, removed: u64) -> NodeSet {
        let mut all: Vec<u64> = self.0.iter().chain(&other.0).copied().filter(|&x| x != removed).collect();
        all.sort_unstable();
        all.dedup();
        NodeSet(all)
    }

    /// `2S`, or `None` on overflow.
    pub fn doubled(&self) -> Option<NodeSet> {
        self.0.iter().map(|x| x.checked_mul(2)).collect::<Option<Vec<_>>>().map(NodeSet)
    }

    pub fn intruders(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied().filter(|&x| is_intruder(x))
    }

    pub fn largest_intruder(&self) -> Option<u64> {
        self.0.iter().rev().copied().find(|&x| is_intruder(x))
    }

    pub fn intruder_count(&self) -> usize {
        self.intruders().count()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
