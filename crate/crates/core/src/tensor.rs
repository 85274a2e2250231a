//! Symmetric and strongly symmetric tensor storage.
//!
//! [`SymTensor`] keys entries by canonical multi-index, so permuted reads
//! land on the same slot. [`SubsetTensor`] keys entries by the distinct
//! index set, which is exactly the information a strongly symmetric tensor
//! carries. Missing keys are zero in both.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::TensorError;
use crate::index::{canonicalize, multisets, MultiIndex, Shape, SupportSet};
use crate::scalar::{powi, Scalar};

/// Read access and the multilinear contractions `A x^m`, `A x^{m-1}`.
pub trait SymmetricForm<T: Scalar> {
    fn shape(&self) -> Shape;

    /// Entry at a canonical multi-index.
    fn entry(&self, index: &MultiIndex) -> T;

    /// Stored entries labelled by their 1-based key (multi-index or set).
    fn stored_values(&self) -> Vec<(Vec<usize>, T)>;

    /// `A x^m = Σ a_{i1…im} x_{i1} ⋯ x_{im}` over all `n^m` tuples.
    fn contract_full(&self, x: &[T]) -> Result<T, TensorError>;

    /// `(A x^{m-1})_i = Σ a_{i i2…im} x_{i2} ⋯ x_{im}`.
    fn contract_once(&self, x: &[T]) -> Result<Vec<T>, TensorError>;
}

/// Dense symmetric tensor keyed by canonical multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor<T> {
    shape: Shape,
    entries: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> SymTensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        Self {
            shape,
            entries: BTreeMap::new(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Stores `value` at `index`; an exact zero clears the slot.
    pub fn insert(&mut self, index: MultiIndex, value: T) -> Result<(), TensorError> {
        if index.order() != self.shape.order() {
            return Err(TensorError::WrongArity {
                expected: self.shape.order(),
                found: index.order(),
            });
        }
        if let Some(&bad) = index.indices().iter().find(|&&i| i >= self.shape.dim()) {
            return Err(TensorError::IndexOutOfRange {
                index: bad + 1,
                dim: self.shape.dim(),
            });
        }
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    /// Stores a value addressed by a 1-based index tuple in any order.
    pub fn set(&mut self, raw: &[usize], value: T) -> Result<(), TensorError> {
        let index = canonicalize(raw, self.shape)?;
        self.insert(index, value)
    }

    pub fn get(&self, index: &MultiIndex) -> T {
        self.entries.get(index).cloned().unwrap_or_else(T::zero)
    }

    /// Reads a 1-based index tuple in any order.
    pub fn get_raw(&self, raw: &[usize]) -> Result<T, TensorError> {
        Ok(self.get(&canonicalize(raw, self.shape)?))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymTensor<U> {
        let mut out = SymTensor::zeros(self.shape);
        for (k, v) in &self.entries {
            let value = f(v);
            if !value.is_zero() {
                out.entries.insert(k.clone(), value);
            }
        }
        out
    }

    pub fn to_f64(&self) -> SymTensor<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: &T) -> Self {
        self.map(|v| v.clone() * factor.clone())
    }

    fn combine(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch {
                left: self.shape,
                right: other.shape,
            });
        }
        let keys: BTreeSet<&MultiIndex> = self.entries.keys().chain(other.entries.keys()).collect();
        let mut out = Self::zeros(self.shape);
        for k in keys {
            let value = op(self.get(k), other.get(k));
            if !value.is_zero() {
                out.entries.insert(k.clone(), value);
            }
        }
        Ok(out)
    }

    /// Largest `|entry|` as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Groups stored entries by similarity class and reports, per class, the
    /// first member whose value differs from the class's first member.
    pub(crate) fn similarity_conflicts(&self) -> Vec<(MultiIndex, T, MultiIndex, T)> {
        let classes: BTreeSet<SupportSet> =
            self.entries.keys().map(MultiIndex::distinct_set).collect();
        let mut conflicts = Vec::new();
        for class in classes {
            let members = class.class_members(self.shape.order());
            let reference = &members[0];
            let reference_value = self.get(reference);
            for member in &members[1..] {
                let value = self.get(member);
                if !(value.clone() - reference_value.clone()).is_negligible() {
                    conflicts.push((
                        reference.clone(),
                        reference_value.clone(),
                        member.clone(),
                        value,
                    ));
                    break;
                }
            }
        }
        conflicts
    }

    /// Converts to subset storage, failing with a witness pair of similar
    /// indices holding different values.
    pub fn to_subset(&self) -> Result<SubsetTensor<T>, TensorError> {
        if let Some((first, first_value, second, second_value)) =
            self.similarity_conflicts().into_iter().next()
        {
            return Err(TensorError::NotStronglySymmetric {
                first,
                second,
                first_value: first_value.render(),
                second_value: second_value.render(),
            });
        }
        let mut out = SubsetTensor::zeros(self.shape);
        for (index, value) in &self.entries {
            out.values
                .entry(index.distinct_set())
                .or_insert_with(|| value.clone());
        }
        Ok(out)
    }
}

impl<T: Scalar> SymmetricForm<T> for SymTensor<T> {
    fn shape(&self) -> Shape {
        self.shape
    }

    fn entry(&self, index: &MultiIndex) -> T {
        self.get(index)
    }

    fn stored_values(&self) -> Vec<(Vec<usize>, T)> {
        self.entries
            .iter()
            .map(|(k, v)| (k.one_based(), v.clone()))
            .collect()
    }

    fn contract_full(&self, x: &[T]) -> Result<T, TensorError> {
        self.shape.check_vector_len(x.len())?;
        let mut total = T::zero();
        for (index, value) in &self.entries {
            let mut term = value.clone() * T::from_u128(index.orbit_size());
            for &i in index.indices() {
                term = term * x[i].clone();
            }
            total = total + term;
        }
        Ok(total)
    }

    fn contract_once(&self, x: &[T]) -> Result<Vec<T>, TensorError> {
        self.shape.check_vector_len(x.len())?;
        let mut out = vec![T::zero(); self.shape.dim()];
        for (index, value) in &self.entries {
            for i in index.distinct_set().iter() {
                let rest = index
                    .without_one(i)
                    .expect("member of its own distinct set");
                let mut term = value.clone() * T::from_u128(rest.orbit_size());
                for &j in rest.indices() {
                    term = term * x[j].clone();
                }
                out[i] = out[i].clone() + term;
            }
        }
        Ok(out)
    }
}

/// Strongly symmetric tensor: one value per distinct index set of size ≤ m.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetTensor<T> {
    shape: Shape,
    values: BTreeMap<SupportSet, T>,
}

impl<T: Scalar> SubsetTensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        Self {
            shape,
            values: BTreeMap::new(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn validate(&self, set: &SupportSet) -> Result<(), TensorError> {
        if set.is_empty() {
            return Err(TensorError::EmptySet);
        }
        if set.span() > self.shape.dim() {
            return Err(TensorError::IndexOutOfRange {
                index: set.span(),
                dim: self.shape.dim(),
            });
        }
        if set.len() > self.shape.order() {
            return Err(TensorError::SetTooLarge {
                set: *set,
                order: self.shape.order(),
            });
        }
        Ok(())
    }

    /// Stores `value` for `set`; an exact zero clears the slot.
    pub fn insert(&mut self, set: SupportSet, value: T) -> Result<(), TensorError> {
        self.validate(&set)?;
        if value.is_zero() {
            self.values.remove(&set);
        } else {
            self.values.insert(set, value);
        }
        Ok(())
    }

    /// Stores a value addressed by distinct 1-based indices.
    pub fn set(&mut self, indices: &[usize], value: T) -> Result<(), TensorError> {
        let set = SupportSet::from_one_based(indices, self.shape.dim())?;
        self.insert(set, value)
    }

    /// Adds `delta` to the value at `set` (no validation; crate-internal hot path).
    pub(crate) fn add_at(&mut self, set: SupportSet, delta: &T) {
        let slot = self.values.entry(set).or_insert_with(T::zero);
        *slot = slot.clone() + delta.clone();
        if slot.is_zero() {
            self.values.remove(&set);
        }
    }

    pub fn get(&self, set: &SupportSet) -> T {
        self.values.get(set).cloned().unwrap_or_else(T::zero)
    }

    /// Reads the entry at any 1-based index tuple of length m.
    pub fn get_raw(&self, raw: &[usize]) -> Result<T, TensorError> {
        Ok(self.get(&canonicalize(raw, self.shape)?.distinct_set()))
    }

    /// Stored values in graded order (size, then lexicographic).
    pub fn iter(&self) -> impl Iterator<Item = (&SupportSet, &T)> {
        self.values.iter()
    }

    /// Stored values on sets of exactly `size` members.
    pub fn level(&self, size: usize) -> impl Iterator<Item = (&SupportSet, &T)> {
        self.values.iter().filter(move |(s, _)| s.len() == size)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Scalar::is_negligible)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SubsetTensor<U> {
        let mut out = SubsetTensor::zeros(self.shape);
        for (k, v) in &self.values {
            let value = f(v);
            if !value.is_zero() {
                out.values.insert(*k, value);
            }
        }
        out
    }

    pub fn to_f64(&self) -> SubsetTensor<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch {
                left: self.shape,
                right: other.shape,
            });
        }
        let keys: BTreeSet<SupportSet> = self
            .values
            .keys()
            .chain(other.values.keys())
            .copied()
            .collect();
        let mut out = Self::zeros(self.shape);
        for k in keys {
            let value = op(self.get(&k), other.get(&k));
            if !value.is_zero() {
                out.values.insert(k, value);
            }
        }
        Ok(out)
    }

    /// Expands every class into its canonical multi-indices.
    pub fn to_dense(&self) -> SymTensor<T> {
        let mut out = SymTensor::zeros(self.shape);
        for (set, value) in &self.values {
            for member in set.class_members(self.shape.order()) {
                out.entries.insert(member, value.clone());
            }
        }
        out
    }
}

/// Signed count-weighted sum over tuples in `S^k` that cover `cover`:
/// `Σ_{Q ⊆ cover} (-1)^{|Q|} (Σ_{j ∈ S \ Q} x_j)^k`.
fn covering_power_sum<T: Scalar>(set: SupportSet, cover: SupportSet, x: &[T], k: usize) -> T {
    let mut total = T::zero();
    for dropped in cover.all_subsets() {
        let kept = SupportSet::from_mask(set.mask() & !dropped.mask());
        let sum = kept.iter().fold(T::zero(), |acc, j| acc + x[j].clone());
        let term = powi(&sum, k);
        total = if dropped.len() % 2 == 0 {
            total + term
        } else {
            total - term
        };
    }
    total
}

impl<T: Scalar> SymmetricForm<T> for SubsetTensor<T> {
    fn shape(&self) -> Shape {
        self.shape
    }

    fn entry(&self, index: &MultiIndex) -> T {
        self.get(&index.distinct_set())
    }

    fn stored_values(&self) -> Vec<(Vec<usize>, T)> {
        self.values
            .iter()
            .map(|(k, v)| (k.one_based(), v.clone()))
            .collect()
    }

    fn contract_full(&self, x: &[T]) -> Result<T, TensorError> {
        self.shape.check_vector_len(x.len())?;
        let m = self.shape.order();
        let mut total = T::zero();
        for (set, value) in &self.values {
            // Tuples in S^m using every member of S.
            total = total + value.clone() * covering_power_sum(*set, *set, x, m);
        }
        Ok(total)
    }

    fn contract_once(&self, x: &[T]) -> Result<Vec<T>, TensorError> {
        self.shape.check_vector_len(x.len())?;
        let m = self.shape.order();
        let mut out = vec![T::zero(); self.shape.dim()];
        for (set, value) in &self.values {
            for i in set.iter() {
                // Tuples (i2..im) in S^{m-1} that, together with i, cover S.
                let weight = covering_power_sum(*set, set.without(i), x, m - 1);
                out[i] = out[i].clone() + value.clone() * weight;
            }
        }
        Ok(out)
    }
}

/// The rank-one tensor `u^m` with entries `u_{i1} ⋯ u_{im}`.
pub fn rank_one<T: Scalar>(u: &[T], order: usize) -> Result<SymTensor<T>, TensorError> {
    let shape = Shape::new(order, u.len())?;
    let nonzero: Vec<usize> = (0..u.len()).filter(|&i| !u[i].is_zero()).collect();
    let mut out = SymTensor::zeros(shape);
    for indices in multisets(&nonzero, order) {
        let value = indices.iter().fold(T::one(), |acc, &i| acc * u[i].clone());
        out.entries
            .insert(MultiIndex::from_zero_based(indices), value);
    }
    Ok(out)
}

/// `supp(x) = { i : x_i ≠ 0 }` (backend zero test).
pub fn support<T: Scalar>(x: &[T]) -> SupportSet {
    SupportSet::from_zero_based((0..x.len()).filter(|&i| !x[i].is_negligible()))
}

/// Componentwise power `x^[s]`.
pub fn power<T: Scalar>(x: &[T], s: usize) -> Vec<T> {
    x.iter().map(|v| powi(v, s)).collect()
}

/// The binary vector with ones on `set`.
pub fn indicator<T: Scalar>(set: SupportSet, dim: usize) -> Vec<T> {
    (0..dim)
        .map(|i| if set.contains(i) { T::one() } else { T::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn qs(vs: &[i64]) -> Vec<Rational> {
        vs.iter().map(|&v| q(v)).collect()
    }

    fn shape(m: usize, n: usize) -> Shape {
        Shape::new(m, n).unwrap()
    }

    #[test]
    fn rank_one_unit_vector() {
        let t = rank_one(&qs(&[1, 0, 0]), 3).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.get_raw(&[1, 1, 1]).unwrap(), q(1));
    }

    #[test]
    fn rank_one_all_ones() {
        let t = rank_one(&qs(&[1, 1]), 3).unwrap();
        assert_eq!(t.nnz(), 4);
        for raw in [
            [1, 1, 1],
            [1, 1, 2],
            [1, 2, 1],
            [2, 1, 1],
            [1, 2, 2],
            [2, 2, 2],
        ] {
            assert_eq!(t.get_raw(&raw).unwrap(), q(1));
        }
    }

    #[test]
    fn rank_one_direct_product() {
        let t = rank_one(&qs(&[2, 0, 1]), 2).unwrap();
        assert_eq!(t.get_raw(&[1, 1]).unwrap(), q(4));
        assert_eq!(t.get_raw(&[1, 3]).unwrap(), q(2));
        assert_eq!(t.get_raw(&[3, 1]).unwrap(), q(2));
        assert_eq!(t.get_raw(&[3, 3]).unwrap(), q(1));
        assert_eq!(t.get_raw(&[1, 2]).unwrap(), q(0));
        assert_eq!(t.nnz(), 3);
    }

    #[test]
    fn rank_one_contractions() {
        let t = rank_one(&qs(&[1, 1]), 3).unwrap();
        assert_eq!(t.contract_full(&qs(&[1, 1])).unwrap(), q(8));
        assert_eq!(t.contract_once(&qs(&[1, 1])).unwrap(), qs(&[4, 4]));
        assert_eq!(t.contract_full(&qs(&[0, 0])).unwrap(), q(0));
        assert_eq!(t.contract_once(&qs(&[0, 0])).unwrap(), qs(&[0, 0]));
    }

    #[test]
    fn contraction_dimension_mismatch() {
        let t = rank_one(&qs(&[1, 1]), 3).unwrap();
        assert_eq!(
            t.contract_full(&qs(&[1, 1, 1])),
            Err(TensorError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
        assert!(t.to_subset().unwrap().contract_once(&qs(&[1])).is_err());
    }

    #[test]
    fn subset_contractions_match_dense() {
        let mut a = SubsetTensor::zeros(shape(3, 4));
        a.set(&[1], q(3)).unwrap();
        a.set(&[2, 4], q(-2)).unwrap();
        a.set(&[1, 2, 3], q(5)).unwrap();
        a.set(&[3], q(1)).unwrap();
        let dense = a.to_dense();
        let x = qs(&[2, -1, 3, 5]);
        assert_eq!(
            a.contract_full(&x).unwrap(),
            dense.contract_full(&x).unwrap()
        );
        assert_eq!(
            a.contract_once(&x).unwrap(),
            dense.contract_once(&x).unwrap()
        );
    }

    #[test]
    fn to_subset_collects_classes() {
        let mut t = SymTensor::zeros(shape(3, 2));
        t.set(&[1, 1, 2], q(3)).unwrap();
        t.set(&[1, 2, 2], q(3)).unwrap();
        let s = t.to_subset().unwrap();
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(&SupportSet::from_zero_based([0, 1])), q(3));
    }

    #[test]
    fn to_subset_rejects_with_witness() {
        let mut t = SymTensor::zeros(shape(3, 2));
        t.set(&[1, 1, 2], q(1)).unwrap();
        t.set(&[1, 2, 2], q(2)).unwrap();
        match t.to_subset() {
            Err(TensorError::NotStronglySymmetric {
                first,
                second,
                first_value,
                second_value,
            }) => {
                assert_eq!(first.one_based(), vec![1, 1, 2]);
                assert_eq!(second.one_based(), vec![1, 2, 2]);
                assert_eq!((first_value.as_str(), second_value.as_str()), ("1", "2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_tensor_converts_to_empty_map() {
        let t: SymTensor<Rational> = SymTensor::zeros(shape(3, 4));
        assert_eq!(t.to_subset().unwrap().nnz(), 0);
    }

    #[test]
    fn to_dense_expands_classes() {
        let mut a = SubsetTensor::zeros(shape(2, 1));
        a.set(&[1], q(2)).unwrap();
        assert_eq!(a.to_dense().get_raw(&[1, 1]).unwrap(), q(2));

        let mut a = SubsetTensor::zeros(shape(3, 2));
        a.set(&[1, 2], q(1)).unwrap();
        let d = a.to_dense();
        assert_eq!(d.get_raw(&[1, 1, 2]).unwrap(), q(1));
        assert_eq!(d.get_raw(&[1, 2, 2]).unwrap(), q(1));
        assert_eq!(d.get_raw(&[1, 1, 1]).unwrap(), q(0));
        assert_eq!(d.get_raw(&[2, 2, 2]).unwrap(), q(0));
    }

    #[test]
    fn subset_insert_validation() {
        let mut a: SubsetTensor<Rational> = SubsetTensor::zeros(shape(2, 3));
        assert!(matches!(
            a.set(&[1, 2, 3], q(1)),
            Err(TensorError::SetTooLarge { .. })
        ));
        assert!(matches!(
            a.set(&[4], q(1)),
            Err(TensorError::IndexOutOfRange { .. })
        ));
        assert_eq!(a.set(&[], q(1)), Err(TensorError::EmptySet));
        a.set(&[1], q(1)).unwrap();
        a.set(&[1], q(0)).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn vector_helpers() {
        assert_eq!(support(&qs(&[0, 3, 0, -1])).one_based(), vec![2, 4]);
        assert_eq!(power(&qs(&[2, -3]), 2), qs(&[4, 9]));
        assert_eq!(
            indicator::<Rational>(SupportSet::from_zero_based([1]), 3),
            qs(&[0, 1, 0])
        );
    }
}
