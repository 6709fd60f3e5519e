//! Small helpers over [`FixedBitSet`], the storage for fibers and classes.

use alloc::vec::Vec;

pub use fixedbitset::FixedBitSet as BitSet;

pub fn from_indices(len: usize, items: impl IntoIterator<Item = usize>) -> BitSet {
    let mut set = BitSet::with_capacity(len);
    for i in items {
        set.insert(i);
    }
    set
}

pub fn full(len: usize) -> BitSet {
    let mut set = BitSet::with_capacity(len);
    set.insert_range(..);
    set
}

pub fn complement(set: &BitSet) -> BitSet {
    let mut out = set.clone();
    out.toggle_range(..);
    out
}

pub fn symmetric_difference(a: &BitSet, b: &BitSet) -> BitSet {
    let mut out = a.clone();
    out.symmetric_difference_with(b);
    out
}

pub fn intersection(a: &BitSet, b: &BitSet) -> BitSet {
    let mut out = a.clone();
    out.intersect_with(b);
    out
}

/// Sum of `weights[i]` over members.
pub fn weighted(set: &BitSet, weights: &[u128]) -> u128 {
    set.ones().map(|i| weights[i]).sum()
}

/// Hashable/orderable identity of a set.
pub fn key(set: &BitSet) -> Vec<usize> {
    set.as_slice().to_vec()
}

pub fn members(set: &BitSet) -> Vec<usize> {
    set.ones().collect()
}
