//! Structural conditions on symmetric tensors.
//!
//! The necessary conditions every CP tensor satisfies (zero pattern, s-duplicate
//! and diagonal-mean dominance) and the sufficient one (hierarchical
//! dominance on a strongly symmetric nonnegative tensor). Every check collects
//! all violations rather than stopping at the first.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::CheckError;
use crate::index::{MultiIndex, SupportSet};
use crate::report::{CheckReport, Condition, Violation};
use crate::scalar::Scalar;
use crate::tensor::{SubsetTensor, SymTensor, SymmetricForm};

/// Passes iff every similarity class holds a single value; reports the first
/// differing pair per class.
pub fn is_strongly_symmetric<T: Scalar>(a: &SymTensor<T>) -> CheckReport {
    let violations = a
        .similarity_conflicts()
        .into_iter()
        .map(|(first, first_value, second, second_value)| Violation {
            condition: Condition::StrongSymmetry,
            witness: vec![first.one_based(), second.one_based()],
            lhs: first_value.to_f64(),
            rhs: second_value.to_f64(),
        })
        .collect();
    CheckReport::from_violations(violations)
}

pub fn is_nonnegative<T: Scalar, A: SymmetricForm<T>>(a: &A) -> CheckReport {
    let violations = a
        .stored_values()
        .into_iter()
        .filter(|(_, v)| v.is_negative())
        .map(|(key, v)| Violation {
            condition: Condition::Nonnegativity,
            witness: vec![key],
            lhs: v.to_f64(),
            rhs: 0.0,
        })
        .collect();
    CheckReport::from_violations(violations)
}

/// If `values[S] ≠ 0` then every nonempty `T ⊆ S` must carry a positive value.
/// Witnesses are `(S, T)`.
pub fn check_zero_pattern_dominance<T: Scalar>(a: &SubsetTensor<T>) -> CheckReport {
    let mut violations = Vec::new();
    for (set, value) in a.iter() {
        if value.is_negligible() {
            continue;
        }
        let mut subsets: Vec<SupportSet> = set.nonempty_subsets().collect();
        subsets.sort();
        for sub in subsets {
            let sub_value = a.get(&sub);
            if !sub_value.is_positive() {
                violations.push(Violation {
                    condition: Condition::ZeroPattern,
                    witness: vec![set.one_based(), sub.one_based()],
                    lhs: sub_value.to_f64(),
                    rhs: 0.0,
                });
            }
        }
    }
    CheckReport::from_violations(violations)
}

/// A family of `s` index tuples, each dominated by `target`, in which every
/// index occurring `t` times in `target` occurs `s·t` times in total.
#[derive(Debug, Clone, PartialEq)]
pub struct SDuplicate {
    target: MultiIndex,
    members: Vec<MultiIndex>,
}

impl SDuplicate {
    pub fn new(target: MultiIndex, members: Vec<MultiIndex>) -> Result<Self, CheckError> {
        if members.is_empty() {
            return Err(CheckError::InvalidDuplicate("no members".into()));
        }
        let s = members.len();
        for member in &members {
            if member.order() != target.order() {
                return Err(CheckError::InvalidDuplicate(format!(
                    "member {member} has order {}, target {target} has order {}",
                    member.order(),
                    target.order()
                )));
            }
            if !member.is_dominated_by(&target) {
                let stray = member
                    .indices()
                    .iter()
                    .find(|&&i| !target.distinct_set().contains(i))
                    .map_or(0, |i| i + 1);
                return Err(CheckError::InvalidDuplicate(format!(
                    "member {member} is not dominated by {target} (index {stray})"
                )));
            }
        }
        for i in target.distinct_set().iter() {
            let expected = s * target.multiplicity(i);
            let found: usize = members.iter().map(|m| m.multiplicity(i)).sum();
            if found != expected {
                return Err(CheckError::InvalidDuplicate(format!(
                    "index {} appears {found} times across members, expected {s}·{} = {expected}",
                    i + 1,
                    target.multiplicity(i)
                )));
            }
        }
        Ok(Self { target, members })
    }

    /// The diagonal duplicate `{(j_p, …, j_p) : p = 1..m}` of `target`.
    pub fn diagonal(target: MultiIndex) -> Self {
        let m = target.order();
        let members = target
            .indices()
            .iter()
            .map(|&j| MultiIndex::from_zero_based(vec![j; m]))
            .collect();
        Self { target, members }
    }

    pub fn target(&self) -> &MultiIndex {
        &self.target
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn s(&self) -> usize {
        self.members.len()
    }
}

/// `(1/s) Σ_p a[member_p] ≥ a[target]`.
pub fn check_s_duplicate<T: Scalar, A: SymmetricForm<T>>(
    a: &A,
    duplicate: &SDuplicate,
) -> CheckReport {
    let s = duplicate.s();
    let total = duplicate
        .members()
        .iter()
        .fold(T::zero(), |acc, m| acc + a.entry(m));
    let target = a.entry(duplicate.target());
    let scaled_target = target.clone() * T::from_u128(s as u128);
    let mut violations = Vec::new();
    if !total.dominates(&scaled_target) {
        let mut witness = vec![duplicate.target().one_based()];
        witness.extend(duplicate.members().iter().map(MultiIndex::one_based));
        violations.push(Violation {
            condition: Condition::SDuplicate,
            witness,
            lhs: total.to_f64() / s as f64,
            rhs: target.to_f64(),
        });
    }
    CheckReport::from_violations(violations)
}

/// Applies the diagonal duplicate to every multi-index of every nonzero
/// class: `(1/m) Σ_p a_{j_p…j_p} ≥ a_{j_1…j_m}`.
pub fn check_diagonal_mean_dominance<T: Scalar>(a: &SubsetTensor<T>) -> CheckReport {
    let m = a.shape().order();
    let mut violations = Vec::new();
    for (set, value) in a.iter() {
        if value.is_negligible() {
            continue;
        }
        let scaled = value.clone() * T::from_u128(m as u128);
        for member in set.class_members(m) {
            let diagonal_sum = member.indices().iter().fold(T::zero(), |acc, &j| {
                acc + a.get(&SupportSet::from_zero_based([j]))
            });
            if !diagonal_sum.dominates(&scaled) {
                violations.push(Violation {
                    condition: Condition::DiagonalMean,
                    witness: vec![member.one_based()],
                    lhs: diagonal_sum.to_f64() / m as f64,
                    rhs: value.to_f64(),
                });
            }
        }
    }
    CheckReport::from_violations(violations)
}

/// For every `S` with `1 ≤ |S| ≤ m - q`: `values[S] ≥ Σ { values[T] : S ⊂ T, |T| = |S| + q }`.
fn superset_dominance<T: Scalar>(
    a: &SubsetTensor<T>,
    depth: usize,
    condition: Condition,
) -> CheckReport {
    let m = a.shape().order();
    let mut superset_sums: BTreeMap<SupportSet, T> = BTreeMap::new();
    for (set, value) in a.iter() {
        if set.len() <= depth {
            continue;
        }
        for sub in set.subsets_of_size(set.len() - depth) {
            let slot = superset_sums.entry(sub).or_insert_with(T::zero);
            *slot = slot.clone() + value.clone();
        }
    }
    let candidates: BTreeSet<SupportSet> = superset_sums
        .keys()
        .copied()
        .chain(a.iter().map(|(s, _)| *s))
        .filter(|s| s.len() + depth <= m)
        .collect();
    let mut violations = Vec::new();
    for set in candidates {
        let lhs = a.get(&set);
        let rhs = superset_sums.get(&set).cloned().unwrap_or_else(T::zero);
        if !lhs.dominates(&rhs) {
            violations.push(Violation {
                condition,
                witness: vec![set.one_based()],
                lhs: lhs.to_f64(),
                rhs: rhs.to_f64(),
            });
        }
    }
    CheckReport::from_violations(violations)
}

/// Each set of size `p < m` dominates the sum over its `(p+1)`-supersets.
pub fn check_hierarchical_dominance<T: Scalar>(a: &SubsetTensor<T>) -> CheckReport {
    superset_dominance(a, 1, Condition::Hierarchical)
}

/// Each set of size `p ≤ m - q` dominates the sum over its `(p+q)`-supersets.
pub fn check_propagated_dominance<T: Scalar>(
    a: &SubsetTensor<T>,
    depth: usize,
) -> Result<CheckReport, CheckError> {
    let max = a.shape().order() - 1;
    if depth == 0 || depth > max {
        return Err(CheckError::BadDepth { depth, max });
    }
    Ok(superset_dominance(
        a,
        depth,
        Condition::Propagated { depth },
    ))
}

/// Every structural check on a strongly symmetric tensor, labelled.
pub fn structural_suite<T: Scalar>(a: &SubsetTensor<T>) -> Vec<(String, CheckReport)> {
    let mut out = vec![
        ("nonnegativity".to_string(), is_nonnegative(a)),
        ("zero-pattern".to_string(), check_zero_pattern_dominance(a)),
        (
            "diagonal-mean".to_string(),
            check_diagonal_mean_dominance(a),
        ),
        ("hierarchical".to_string(), check_hierarchical_dominance(a)),
    ];
    for depth in 1..a.shape().order() {
        let report = check_propagated_dominance(a, depth).expect("depth in range");
        out.push((format!("propagated(q={depth})"), report));
    }
    out
}
