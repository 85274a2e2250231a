//! Shapes, canonical multi-indices and index subsets.
//!
//! Indices are 0-based inside the crate and 1-based in every textual form
//! (`Display`, file I/O, reports).

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::TensorError;

/// Largest supported dimension; index sets are stored as `u64` bitmasks.
pub const MAX_DIM: usize = 64;

/// Order `m` and dimension `n` of a symmetric tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Shape {
    order: usize,
    dim: usize,
}

impl Shape {
    pub fn new(order: usize, dim: usize) -> Result<Self, TensorError> {
        if order < 2 {
            return Err(TensorError::OrderTooSmall(order));
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(TensorError::BadDimension(dim));
        }
        Ok(Self { order, dim })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of canonical (sorted) multi-indices, `C(n + m - 1, m)`.
    pub fn canonical_len(&self) -> u128 {
        binomial(self.dim + self.order - 1, self.order)
    }

    /// Every canonical multi-index in lexicographic order.
    pub fn canonical_indices(&self) -> Vec<MultiIndex> {
        let all: Vec<usize> = (0..self.dim).collect();
        multisets(&all, self.order)
            .into_iter()
            .map(MultiIndex)
            .collect()
    }

    pub(crate) fn check_vector_len(&self, len: usize) -> Result<(), TensorError> {
        if len != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}, n={}", self.order, self.dim)
    }
}

/// A sorted tuple of `m` indices; the canonical representative of its
/// permutation orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Builds from 0-based indices, sorting them.
    pub fn from_zero_based(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// The set of distinct members `[(i1, …, im)]`.
    pub fn distinct_set(&self) -> SupportSet {
        SupportSet::from_zero_based(self.0.iter().copied())
    }

    /// `self ⪯ other`: the distinct set of `self` is contained in that of `other`.
    pub fn is_dominated_by(&self, other: &MultiIndex) -> bool {
        self.distinct_set().is_subset_of(&other.distinct_set())
    }

    /// `self ∼ other`: equal distinct sets.
    pub fn is_similar_to(&self, other: &MultiIndex) -> bool {
        self.distinct_set() == other.distinct_set()
    }

    /// Number of index tuples that sort to this one, `m! / ∏ mult!`.
    pub fn orbit_size(&self) -> u128 {
        let mut size = 1u128;
        let mut placed = 0usize;
        for run in self.0.chunk_by(|a, b| a == b) {
            placed += run.len();
            size *= binomial(placed, run.len());
        }
        size
    }

    /// How often `index` (0-based) occurs.
    pub fn multiplicity(&self, index: usize) -> usize {
        self.0.iter().filter(|&&i| i == index).count()
    }

    /// Copy with one occurrence of `index` removed.
    pub(crate) fn without_one(&self, index: usize) -> Option<MultiIndex> {
        let pos = self.0.iter().position(|&i| i == index)?;
        let mut rest = self.0.clone();
        rest.remove(pos);
        Some(MultiIndex(rest))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

/// Sorts a 1-based raw index tuple into its canonical representative.
pub fn canonicalize(raw: &[usize], shape: Shape) -> Result<MultiIndex, TensorError> {
    if raw.len() != shape.order() {
        return Err(TensorError::WrongArity {
            expected: shape.order(),
            found: raw.len(),
        });
    }
    let mut indices = Vec::with_capacity(raw.len());
    for &i in raw {
        if i == 0 || i > shape.dim() {
            return Err(TensorError::IndexOutOfRange {
                index: i,
                dim: shape.dim(),
            });
        }
        indices.push(i - 1);
    }
    Ok(MultiIndex::from_zero_based(indices))
}

/// A nonempty subset of `{0, …, n-1}` stored as a bitmask.
///
/// Ordered by size first, then lexicographically by sorted members, which is
/// the graded order the elimination and the file renderer walk in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportSet(u64);

impl SupportSet {
    pub fn from_zero_based(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = 0u64;
        for i in indices {
            assert!(i < MAX_DIM, "index {i} exceeds the supported dimension");
            mask |= 1 << i;
        }
        Self(mask)
    }

    /// From 1-based indices; rejects zero and repeated members.
    pub fn from_one_based(indices: &[usize], dim: usize) -> Result<Self, TensorError> {
        let mut mask = 0u64;
        for &i in indices {
            if i == 0 || i > dim {
                return Err(TensorError::IndexOutOfRange { index: i, dim });
            }
            let bit = 1u64 << (i - 1);
            if mask & bit != 0 {
                return Err(TensorError::RepeatedIndex(i));
            }
            mask |= bit;
        }
        Ok(Self(mask))
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        index < MAX_DIM && self.0 & (1 << index) != 0
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest member plus one (0 for the empty set).
    pub fn span(&self) -> usize {
        MAX_DIM - self.0.leading_zeros() as usize
    }

    /// Members in ascending order, 0-based.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    pub fn without(&self, index: usize) -> SupportSet {
        Self(self.0 & !(1 << index))
    }

    /// All nonempty subsets (including `self`), `2^|S| - 1` of them.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = SupportSet> {
        let full = self.0;
        let mut next = Some(full);
        std::iter::from_fn(move || {
            let current = next?;
            if current == 0 {
                return None;
            }
            next = Some((current - 1) & full);
            Some(SupportSet(current))
        })
    }

    /// All subsets (including the empty set and `self`).
    pub fn all_subsets(&self) -> impl Iterator<Item = SupportSet> {
        self.nonempty_subsets()
            .chain(std::iter::once(SupportSet(0)))
    }

    /// Subsets of exactly `size` members.
    pub fn subsets_of_size(&self, size: usize) -> impl Iterator<Item = SupportSet> + '_ {
        self.all_subsets().filter(move |s| s.len() == size)
    }

    /// The multi-indices of order `m` whose distinct set is exactly `self`,
    /// in lexicographic order. Empty when `|S| > m`.
    pub fn class_members(&self, order: usize) -> Vec<MultiIndex> {
        let members: Vec<usize> = self.iter().collect();
        if members.is_empty() || members.len() > order {
            return Vec::new();
        }
        let mut out = Vec::new();
        for extra in multisets(&members, order - members.len()) {
            out.push(MultiIndex::from_zero_based(
                members.iter().copied().chain(extra).collect(),
            ));
        }
        out.sort();
        out
    }

    /// The representative `(i1, …, ik, ik, …, ik)` of the class.
    pub fn representative(&self, order: usize) -> MultiIndex {
        let mut indices: Vec<usize> = self.iter().collect();
        let last = *indices.last().expect("representative of an empty set");
        indices.resize(order, last);
        MultiIndex(indices)
    }

    /// All subsets of `{0, …, dim-1}` with exactly `size` members, ascending
    /// lexicographically.
    pub fn combinations(dim: usize, size: usize) -> Vec<SupportSet> {
        let mut out = Vec::new();
        if size > dim {
            return out;
        }
        let mut current: Vec<usize> = (0..size).collect();
        loop {
            out.push(SupportSet::from_zero_based(current.iter().copied()));
            let Some(pos) = (0..size).rev().find(|&k| current[k] < dim - size + k) else {
                break;
            };
            current[pos] += 1;
            for k in pos + 1..size {
                current[k] = current[k - 1] + 1;
            }
        }
        out
    }
}

impl Ord for SupportSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for SupportSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SupportSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

/// Sorted multisets of `size` elements drawn from `items` (with repetition),
/// in lexicographic order of positions.
pub(crate) fn multisets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    fn recurse(
        items: &[usize],
        size: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..items.len() {
            cur.push(items[k]);
            recurse(items, size, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    recurse(items, size, 0, &mut Vec::with_capacity(size), &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    num_integer::binomial(n as u128, k as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(m: usize, n: usize) -> Shape {
        Shape::new(m, n).unwrap()
    }

    #[test]
    fn canonicalize_sorts_and_reports_distinct_set() {
        let idx = canonicalize(&[1, 1, 4, 5], shape(4, 5)).unwrap();
        assert_eq!(idx.one_based(), vec![1, 1, 4, 5]);
        assert_eq!(idx.distinct_set().one_based(), vec![1, 4, 5]);

        let idx = canonicalize(&[3, 1, 2], shape(3, 3)).unwrap();
        assert_eq!(idx.one_based(), vec![1, 2, 3]);

        let idx = canonicalize(&[2, 6, 9], shape(3, 10)).unwrap();
        assert_eq!(idx.one_based(), vec![2, 6, 9]);
        assert_eq!(idx.distinct_set().one_based(), vec![2, 6, 9]);
    }

    #[test]
    fn canonicalize_errors() {
        assert_eq!(
            canonicalize(&[1, 4], shape(2, 3)),
            Err(TensorError::IndexOutOfRange { index: 4, dim: 3 })
        );
        assert_eq!(
            canonicalize(&[0, 1], shape(2, 3)),
            Err(TensorError::IndexOutOfRange { index: 0, dim: 3 })
        );
        assert_eq!(
            canonicalize(&[1, 2, 3], shape(2, 3)),
            Err(TensorError::WrongArity {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn shape_invariants() {
        assert_eq!(Shape::new(1, 3), Err(TensorError::OrderTooSmall(1)));
        assert_eq!(Shape::new(3, 0), Err(TensorError::BadDimension(0)));
        assert_eq!(Shape::new(3, 65), Err(TensorError::BadDimension(65)));
        assert_eq!(shape(3, 10).canonical_len(), 220);
        assert_eq!(shape(3, 10).canonical_indices().len(), 220);
    }

    #[test]
    fn orbit_sizes_sum_to_full_tensor() {
        for (m, n) in [(2, 3), (3, 4), (4, 3)] {
            let total: u128 = shape(m, n)
                .canonical_indices()
                .iter()
                .map(MultiIndex::orbit_size)
                .sum();
            assert_eq!(total, (n as u128).pow(m as u32));
        }
        let idx = MultiIndex::from_zero_based(vec![0, 0, 3, 4]);
        assert_eq!(idx.orbit_size(), 12);
    }

    #[test]
    fn dominance_and_similarity() {
        let a = MultiIndex::from_zero_based(vec![1, 1, 5]);
        let b = MultiIndex::from_zero_based(vec![1, 5, 8]);
        let c = MultiIndex::from_zero_based(vec![1, 5, 5]);
        assert!(a.is_dominated_by(&b));
        assert!(!b.is_dominated_by(&a));
        assert!(a.is_similar_to(&c));
        assert!(!a.is_similar_to(&b));
    }

    #[test]
    fn support_set_ordering_is_graded_lexicographic() {
        let mut sets = [
            SupportSet::from_zero_based([1, 5, 8]),
            SupportSet::from_zero_based([9]),
            SupportSet::from_zero_based([0, 4]),
            SupportSet::from_zero_based([1]),
            SupportSet::from_zero_based([1, 2]),
            SupportSet::from_zero_based([1, 7, 9]),
        ];
        sets.sort();
        let rendered: Vec<String> = sets.iter().map(ToString::to_string).collect();
        assert_eq!(
            rendered,
            ["{2}", "{10}", "{1,5}", "{2,3}", "{2,6,9}", "{2,8,10}"]
        );
    }

    #[test]
    fn subset_enumeration() {
        let s = SupportSet::from_zero_based([0, 2, 5]);
        assert_eq!(s.nonempty_subsets().count(), 7);
        assert_eq!(s.all_subsets().count(), 8);
        assert_eq!(s.subsets_of_size(2).count(), 3);
        assert!(s
            .nonempty_subsets()
            .all(|t| t.is_subset_of(&s) && !t.is_empty()));
        assert_eq!(SupportSet::combinations(10, 3).len(), 120);
        assert_eq!(SupportSet::combinations(4, 0).len(), 1);
        assert!(SupportSet::combinations(3, 4).is_empty());
        let c = SupportSet::combinations(5, 2);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn class_members_cover_the_class() {
        let s = SupportSet::from_zero_based([0, 1]);
        let members: Vec<Vec<usize>> = s
            .class_members(3)
            .iter()
            .map(MultiIndex::one_based)
            .collect();
        assert_eq!(members, vec![vec![1, 1, 2], vec![1, 2, 2]]);
        // C(m-1, k-1) members for a k-set.
        let s = SupportSet::from_zero_based([0, 3, 7]);
        assert_eq!(s.class_members(4).len(), 3);
        assert_eq!(s.representative(4).one_based(), vec![1, 4, 8, 8]);
        assert!(s.class_members(2).is_empty());
    }

    #[test]
    fn one_based_set_validation() {
        assert_eq!(
            SupportSet::from_one_based(&[2, 2], 3),
            Err(TensorError::RepeatedIndex(2))
        );
        assert_eq!(
            SupportSet::from_one_based(&[4], 3),
            Err(TensorError::IndexOutOfRange { index: 4, dim: 3 })
        );
    }
}
