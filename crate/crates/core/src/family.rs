//! Monotone families represented by their minterm antichains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{ElementSet, MAX_GROUND};

/// The upset generated by an antichain of minterms over `{0, …, n-1}`.
///
/// Minterms are kept in canonical order: lexicographic on their increasing
/// index lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MintermFamily {
    n: usize,
    minterms: Vec<ElementSet>,
    k: usize,
}

pub(crate) fn canonical_cmp(a: &ElementSet, b: &ElementSet) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

impl MintermFamily {
    /// Reduces `sets` to its inclusion-minimal members. The generated upset is
    /// unchanged.
    pub fn minimalize<I>(sets: I, n: usize) -> Result<Self>
    where
        I: IntoIterator<Item = ElementSet>,
    {
        check_ground(n)?;
        let mut sets: Vec<ElementSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| s.span() > n) {
            return Err(Error::Malformed(format!(
                "set {bad} has an element outside the ground set of size {n}"
            )));
        }
        sets.sort_by_key(|s| (s.len(), s.bits()));
        sets.dedup();
        let mut kept: Vec<ElementSet> = Vec::with_capacity(sets.len());
        for s in sets {
            if !kept.iter().any(|m| m.is_subset(s)) {
                kept.push(s);
            }
        }
        Ok(Self::from_antichain(n, kept))
    }

    /// Builds a family from explicit index lists, as found in family files.
    pub fn from_index_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        check_ground(n)?;
        let mut sets = Vec::with_capacity(lists.len());
        for list in lists {
            if let Some(&i) = list.iter().find(|&&i| i >= n) {
                return Err(Error::Malformed(format!(
                    "element {i} is outside the ground set of size {n}"
                )));
            }
            sets.push(ElementSet::from_indices(list.iter().copied()));
        }
        Self::minimalize(sets, n)
    }

    fn from_antichain(n: usize, mut minterms: Vec<ElementSet>) -> Self {
        minterms.sort_by(canonical_cmp);
        let k = minterms.iter().map(|m| m.len()).max().unwrap_or(0);
        MintermFamily { n, minterms, k }
    }

    /// The family with no members (measure identically 0).
    pub fn empty(n: usize) -> Result<Self> {
        check_ground(n)?;
        Ok(Self::from_antichain(n, Vec::new()))
    }

    /// The family of all subsets (sole minterm ∅, measure identically 1).
    pub fn full(n: usize) -> Result<Self> {
        check_ground(n)?;
        Ok(Self::from_antichain(n, vec![ElementSet::EMPTY]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Maximum minterm size; 0 for trivial families.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn minterms(&self) -> &[ElementSet] {
        &self.minterms
    }

    pub fn len(&self) -> usize {
        self.minterms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minterms.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.minterms.first() == Some(&ElementSet::EMPTY)
    }

    pub fn is_trivial(&self) -> bool {
        self.is_empty() || self.is_full()
    }

    pub fn ground(&self) -> ElementSet {
        ElementSet::prefix(self.n)
    }

    /// True iff some minterm is contained in `set`.
    pub fn contains(&self, set: ElementSet) -> bool {
        self.minterms.iter().any(|m| m.is_subset(set))
    }

    /// `N^m(V)`: the `m`-sets `W` disjoint from `V` such that `W ∪ V` is a
    /// minterm. Found by scanning the minterms that contain `V`.
    pub fn supplements(&self, v: ElementSet, m: usize) -> Vec<ElementSet> {
        let target = v.len() + m;
        self.minterms
            .iter()
            .filter(|mt| mt.len() == target && v.is_subset(**mt))
            .map(|mt| mt.difference(v))
            .collect()
    }

    /// `ℳ(t)` for `t = 0..=k`.
    pub fn size_histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.k + 1];
        for m in &self.minterms {
            hist[m.len()] += 1;
        }
        hist
    }

    /// Same ground set, minterms restricted to those satisfying `keep`.
    pub fn filter<F: FnMut(&ElementSet) -> bool>(&self, mut keep: F) -> Self {
        let kept = self.minterms.iter().copied().filter(|m| keep(m)).collect();
        Self::from_antichain(self.n, kept)
    }

    /// True iff every member of `other` is a member of `self`.
    pub fn upset_contains(&self, other: &MintermFamily) -> bool {
        other.minterms.iter().all(|m| self.contains(*m))
    }

    /// True iff every minterm of `other` is also a minterm of `self`.
    pub fn has_minterms_of(&self, other: &MintermFamily) -> bool {
        other
            .minterms
            .iter()
            .all(|m| self.minterms.binary_search_by(|x| canonical_cmp(x, m)).is_ok())
    }

    pub fn index_lists(&self) -> Vec<Vec<usize>> {
        self.minterms.iter().map(|m| m.to_vec()).collect()
    }

    /// Canonical single-line JSON, newline terminated.
    pub fn to_json(&self) -> String {
        let file = FamilyFile {
            n: self.n,
            minterms: self.index_lists(),
        };
        let mut s = serde_json::to_string(&file).expect("family serializes");
        s.push('\n');
        s
    }

    /// Parses a family file and minimalizes it. The flag is `false` when the
    /// listed sets were not already an antichain.
    pub fn from_json(text: &str) -> Result<(Self, bool)> {
        let file: FamilyFile = serde_json::from_str(text)?;
        for list in &file.minterms {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Malformed(format!(
                    "minterm {list:?} is not strictly increasing"
                )));
            }
        }
        let fam = Self::from_index_lists(file.n, &file.minterms)?;
        let was_antichain = fam.len() == file.minterms.len();
        Ok((fam, was_antichain))
    }
}

fn check_ground(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GROUND {
        return Err(Error::Malformed(format!(
            "ground set size {n} must lie in 1..={MAX_GROUND}"
        )));
    }
    Ok(())
}

/// On-disk family format: `{"n": <int>, "minterms": [[i, j, ...], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub n: usize,
    pub minterms: Vec<Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> ElementSet {
        ElementSet::from_indices(v.iter().copied())
    }

    fn f1() -> MintermFamily {
        MintermFamily::from_index_lists(3, &[vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn upset(fam_sets: &[ElementSet], n: usize) -> Vec<bool> {
        (0u128..1 << n)
            .map(|b| fam_sets.iter().any(|s| s.is_subset(ElementSet::from_bits(b))))
            .collect()
    }

    #[test]
    fn minimalize_drops_supersets() {
        let fam =
            MintermFamily::from_index_lists(3, &[vec![0, 1], vec![0, 1, 2], vec![1, 2]]).unwrap();
        assert_eq!(fam.minterms(), &[set(&[0, 1]), set(&[1, 2])]);
        assert_eq!(fam.k(), 2);
    }

    #[test]
    fn minimalize_identity_case() {
        let fam = MintermFamily::from_index_lists(1, &[vec![0]]).unwrap();
        assert_eq!(fam.minterms(), &[set(&[0])]);
        assert_eq!(fam.k(), 1);
    }

    #[test]
    fn minimalize_preserves_upset() {
        let raw = vec![set(&[0, 1]), set(&[1]), set(&[2, 3])];
        let fam = MintermFamily::minimalize(raw.clone(), 4).unwrap();
        assert_eq!(fam.minterms(), &[set(&[1]), set(&[2, 3])]);
        assert_eq!(fam.k(), 2);
        assert_eq!(upset(&raw, 4), upset(fam.minterms(), 4));
    }

    #[test]
    fn out_of_range_element_is_malformed() {
        let err = MintermFamily::from_index_lists(3, &[vec![0, 3]]).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
        assert!(MintermFamily::minimalize([set(&[5])], 4).is_err());
        assert!(MintermFamily::from_index_lists(0, &[]).is_err());
    }

    #[test]
    fn membership() {
        let f = f1();
        assert!(f.contains(set(&[0, 1, 2])));
        assert!(!f.contains(set(&[0, 2])));
        assert!(!f.contains(ElementSet::EMPTY));
    }

    #[test]
    fn supplements_f1() {
        let f = f1();
        assert_eq!(f.supplements(set(&[1]), 1), vec![set(&[0]), set(&[2])]);
        assert!(f.supplements(ElementSet::EMPTY, 1).is_empty());
        assert_eq!(f.supplements(ElementSet::EMPTY, 2).len(), 2);
    }

    #[test]
    fn supplements_star() {
        let lists: Vec<Vec<usize>> = (1..9).map(|i| vec![0, i]).collect();
        let star = MintermFamily::from_index_lists(9, &lists).unwrap();
        let sup = star.supplements(set(&[0]), 1);
        assert_eq!(sup, (1..9).map(|i| set(&[i])).collect::<Vec<_>>());
    }

    #[test]
    fn trivial_families() {
        let e = MintermFamily::empty(3).unwrap();
        assert!(e.is_trivial() && e.is_empty() && e.k() == 0);
        let full = MintermFamily::minimalize([set(&[]), set(&[0])], 2).unwrap();
        assert!(full.is_full());
        assert_eq!(full.len(), 1);
        assert!(full.contains(ElementSet::EMPTY));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let text = "{\"n\":4,\"minterms\":[[2,3],[1]]}";
        let (fam, antichain) = MintermFamily::from_json(text).unwrap();
        assert!(antichain);
        let out = fam.to_json();
        assert_eq!(out, "{\"n\":4,\"minterms\":[[1],[2,3]]}\n");
        let (again, _) = MintermFamily::from_json(&out).unwrap();
        assert_eq!(again.to_json(), out);
    }

    #[test]
    fn json_reports_non_antichain_input() {
        let (fam, antichain) =
            MintermFamily::from_json(r#"{"n": 3, "minterms": [[0,1],[0,1,2]]}"#).unwrap();
        assert!(!antichain);
        assert_eq!(fam.len(), 1);
    }

    #[test]
    fn json_rejects_unsorted_minterm() {
        let err = MintermFamily::from_json(r#"{"n": 3, "minterms": [[1,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
        let err = MintermFamily::from_json("{\"n\": 3,\n \"minterms\": [[0,]]}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn containment_of_upsets() {
        let big = MintermFamily::from_index_lists(4, &[vec![0], vec![2, 3]]).unwrap();
        let small = MintermFamily::from_index_lists(4, &[vec![0, 1], vec![1, 2, 3]]).unwrap();
        assert!(big.upset_contains(&small));
        assert!(!small.upset_contains(&big));
        assert!(big.has_minterms_of(&big.filter(|m| m.len() == 1)));
    }
}
