use alloc::vec::Vec;
use core::fmt;
use core::ops::{BitAnd, BitOr, Sub};

/// Position of a node in the name table of the diagram it was created in.
///
/// Subgraphs and mutilated graphs share the name table of their parent, so an
/// id stays meaningful across every diagram derived from the same source.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A set of nodes, stored as a bitset over node ids.
///
/// Iteration is in ascending id order, which is the input order of the
/// diagram's nodes. Trailing zero words are never stored, so structural
/// equality is set equality.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet {
    words: Vec<u64>,
}

const BITS: usize = 64;

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(id: NodeId) -> Self {
        let mut s = Self::new();
        s.insert(id);
        s
    }

    pub fn insert(&mut self, id: NodeId) -> bool {
        let (w, b) = (id.0 / BITS, id.0 % BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, id: NodeId) -> bool {
        let (w, b) = (id.0 / BITS, id.0 % BITS);
        if w >= self.words.len() || self.words[w] & (1 << b) == 0 {
            return false;
        }
        self.words[w] &= !(1 << b);
        self.trim();
        true
    }

    pub fn contains(&self, id: NodeId) -> bool {
        let (w, b) = (id.0 / BITS, id.0 % BITS);
        self.words.get(w).is_some_and(|word| word & (1 << b) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn first(&self) -> Option<NodeId> {
        self.iter().next()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, o) in words.iter_mut().zip(&short.words) {
            *w |= o;
        }
        NodeSet { words }
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let mut out = NodeSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        out.trim();
        out
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        let mut out = NodeSet { words };
        out.trim();
        out
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(NodeId(i * BITS + b))
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|n| n.0)).finish()
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut s = NodeSet::new();
        s.extend(iter);
        s
    }
}

impl Extend<NodeId> for NodeSet {
    fn extend<I: IntoIterator<Item = NodeId>>(&mut self, iter: I) {
        for id in iter {
            self.insert(id);
        }
    }
}

impl BitOr for &NodeSet {
    type Output = NodeSet;
    fn bitor(self, rhs: &NodeSet) -> NodeSet {
        self.union(rhs)
    }
}

impl BitAnd for &NodeSet {
    type Output = NodeSet;
    fn bitand(self, rhs: &NodeSet) -> NodeSet {
        self.intersection(rhs)
    }
}

impl Sub for &NodeSet {
    type Output = NodeSet;
    fn sub(self, rhs: &NodeSet) -> NodeSet {
        self.difference(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(ids: &[usize]) -> NodeSet {
        ids.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn remove_trims_so_equality_is_set_equality() {
        let mut a = set(&[1, 70]);
        a.remove(NodeId(70));
        assert_eq!(a, set(&[1]));
        assert_eq!(a.len(), 1);
    }

    proptest! {
        #[test]
        fn matches_btreeset(a in prop::collection::btree_set(0usize..150, 0..20),
                            b in prop::collection::btree_set(0usize..150, 0..20)) {
            let (sa, sb) = (a.iter().map(|&i| NodeId(i)).collect::<NodeSet>(),
                            b.iter().map(|&i| NodeId(i)).collect::<NodeSet>());
            let ids = |s: &NodeSet| s.iter().map(|n| n.0).collect::<BTreeSet<_>>();
            prop_assert_eq!(ids(&sa.union(&sb)), a.union(&b).copied().collect());
            prop_assert_eq!(ids(&sa.intersection(&sb)), a.intersection(&b).copied().collect());
            prop_assert_eq!(ids(&sa.difference(&sb)), a.difference(&b).copied().collect());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.is_disjoint(&sb), a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
        }
    }
}
