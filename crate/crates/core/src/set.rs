use std::fmt;

/// Largest ground set an [`ElementSet`] can index.
pub const MAX_GROUND: usize = 128;

/// A subset of `{0, …, n-1}` stored as a bitmask; iteration is in
/// increasing index order.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(u128);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub const fn from_bits(bits: u128) -> Self {
        ElementSet(bits)
    }

    pub const fn bits(self) -> u128 {
        self.0
    }

    /// `{0, …, len-1}`.
    pub fn prefix(len: usize) -> Self {
        assert!(len <= MAX_GROUND);
        if len == MAX_GROUND {
            ElementSet(u128::MAX)
        } else {
            ElementSet((1u128 << len) - 1)
        }
    }

    /// Panics if an index is `>= MAX_GROUND`; use
    /// [`MintermFamily::minimalize`](crate::MintermFamily::minimalize) for
    /// validated construction.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(ElementSet::EMPTY, |s, i| s.with(i))
    }

    pub fn singleton(i: usize) -> Self {
        ElementSet::EMPTY.with(i)
    }

    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_GROUND, "element {i} out of range");
        ElementSet(self.0 | (1u128 << i))
    }

    pub fn without(self, i: usize) -> Self {
        ElementSet(self.0 & !(1u128 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_GROUND && self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: ElementSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: ElementSet) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ElementSet) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: ElementSet) -> Self {
        ElementSet(self.0 & !other.0)
    }

    /// One past the largest element, or 0 for the empty set.
    pub fn span(self) -> usize {
        MAX_GROUND - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets, including the empty set and `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        ElementSet::from_indices(iter)
    }
}

pub struct Elements(u128);

impl Iterator for Elements {
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
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Carry-rippler enumeration of the subsets of a mask.
pub struct Subsets {
    mask: u128,
    next: Option<u128>,
}

impl Iterator for Subsets {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.mask) & self.mask;
        self.next = (succ != 0).then_some(succ);
        Some(ElementSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_is_increasing() {
        let s = ElementSet::from_indices([7, 0, 3, 127]);
        assert_eq!(s.to_vec(), vec![0, 3, 7, 127]);
        assert_eq!(s.len(), 4);
        assert_eq!(s.span(), 128);
    }

    #[test]
    fn subsets_of_three() {
        let s = ElementSet::from_indices([1, 4, 9]);
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|t| t.is_subset(s)));
        assert_eq!(subs[0], ElementSet::EMPTY);
        assert_eq!(ElementSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn set_algebra() {
        let a = ElementSet::from_indices([0, 1]);
        let b = ElementSet::from_indices([1, 2]);
        assert_eq!(a.intersection(b), ElementSet::singleton(1));
        assert_eq!(a.union(b), ElementSet::prefix(3));
        assert_eq!(a.difference(b), ElementSet::singleton(0));
        assert!(!a.is_disjoint(b));
        assert_eq!(a.to_string(), "{0,1}");
    }
}
