//! Hierarchical elimination into a symmetric binary decomposition.
//!
//! Level `k = 0..m-1` removes, for every set `S` of size `m - k` still
//! carrying a nonzero value `α`, the binary rank-one term `α (v^S)^m`. A
//! binary rank-one tensor has entry 1 exactly on indices whose distinct set
//! lies inside `S`, so on subset storage the subtraction is
//! `values[T] -= α` for every nonempty `T ⊆ S`. Terms on the same level
//! never touch each other's keys, so processing them one after another
//! matches the simultaneous update.
//!
//! When the input is nonnegative and hierarchically dominated, all
//! coefficients come out nonnegative and the decomposition is a CP
//! factorization with at most `Σ_k C(n, m-k)` factors.

use rand::Rng;
use serde::Serialize;

use crate::checks::check_hierarchical_dominance;
use crate::error::EliminationError;
use crate::index::{binomial, Shape, SupportSet};
use crate::scalar::{Rational, Scalar, FLOAT_EPS};
use crate::tensor::{indicator, rank_one, SubsetTensor, SymTensor};

/// `coefficient · (binary vector on support)^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct Term<T> {
    #[serde(serialize_with = "serialize_scalar")]
    pub coefficient: T,
    pub support: SupportSet,
}

fn serialize_scalar<T: Scalar, S: serde::Serializer>(
    value: &T,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&value.render())
}

/// Terms in level-major order (support size descending), lexicographic
/// within a level.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct Decomposition<T> {
    pub shape: Shape,
    pub terms: Vec<Term<T>>,
}

impl<T: Scalar> Decomposition<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| !t.coefficient.is_negative())
    }
}

/// Snapshots `A^(0), …, A^(m)` (only when requested) and the final residual.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationTrace<T> {
    pub levels: Vec<SubsetTensor<T>>,
    pub residual: SubsetTensor<T>,
}

/// Runs the elimination on a strongly symmetric tensor.
///
/// The rational backend always ends with an exactly zero residual; the
/// float backend reports [`EliminationError::ResidualNonzero`] if anything
/// above [`FLOAT_EPS`] is left.
pub fn eliminate<T: Scalar>(
    a: &SubsetTensor<T>,
    keep_trace: bool,
) -> Result<(Decomposition<T>, EliminationTrace<T>), EliminationError> {
    let shape = a.shape();
    let m = shape.order();
    let mut work = a.clone();
    let mut levels = Vec::new();
    if keep_trace {
        levels.push(work.clone());
    }
    let mut terms = Vec::new();
    for k in 0..m {
        let size = m - k;
        let pivots: Vec<(SupportSet, T)> = work
            .level(size)
            .filter(|(_, v)| !v.is_negligible())
            .map(|(s, v)| (*s, v.clone()))
            .collect();
        for (support, coefficient) in pivots {
            let delta = -coefficient.clone();
            for sub in support.nonempty_subsets() {
                work.add_at(sub, &delta);
            }
            terms.push(Term {
                coefficient,
                support,
            });
        }
        if keep_trace {
            levels.push(work.clone());
        }
    }
    if !T::EXACT {
        let leftover = work.max_abs();
        if leftover > FLOAT_EPS {
            return Err(EliminationError::ResidualNonzero(leftover));
        }
    }
    Ok((
        Decomposition { shape, terms },
        EliminationTrace {
            levels,
            residual: work,
        },
    ))
}

/// `values[T] = Σ { α_k : T ⊆ S_k }`.
pub fn reconstruct<T: Scalar>(d: &Decomposition<T>) -> SubsetTensor<T> {
    let mut out = SubsetTensor::zeros(d.shape);
    for term in &d.terms {
        for sub in term.support.nonempty_subsets() {
            out.add_at(sub, &term.coefficient);
        }
    }
    out
}

/// Nonnegative vectors `u^(k)` with `Σ_k (u^(k))^m` equal to the tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpFactorization {
    pub shape: Shape,
    pub factors: Vec<Vec<f64>>,
}

impl CpFactorization {
    /// Number of factors; an upper bound on the CP rank.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// `Σ_k (u^(k))^m` as a dense tensor.
    pub fn to_dense(&self) -> SymTensor<f64> {
        let mut out = SymTensor::zeros(self.shape);
        for u in &self.factors {
            let term = rank_one(u, self.shape.order()).expect("factor length matches shape");
            out = out.add(&term).expect("same shape");
        }
        out
    }
}

/// Maps every term `(α, S)` to `α^{1/m} · 1_S`; fails on the first negative
/// coefficient, in which case nothing is certified.
pub fn to_cp_factors<T: Scalar>(d: &Decomposition<T>) -> Result<CpFactorization, EliminationError> {
    let m = d.shape.order();
    let n = d.shape.dim();
    let mut factors = Vec::with_capacity(d.terms.len());
    for (position, term) in d.terms.iter().enumerate() {
        if term.coefficient.is_negative() {
            return Err(EliminationError::NegativeCoefficient {
                position,
                support: term.support,
                coefficient: term.coefficient.render(),
            });
        }
        let scale = factor_value(&term.coefficient, m);
        factors.push(
            indicator::<f64>(term.support, n)
                .into_iter()
                .map(|v| v * scale)
                .collect(),
        );
    }
    Ok(CpFactorization {
        shape: d.shape,
        factors,
    })
}

/// `α^{1/m}` in floating point.
pub fn factor_value<T: Scalar>(coefficient: &T, order: usize) -> f64 {
    let alpha = coefficient.to_f64().max(0.0);
    match order {
        2 => alpha.sqrt(),
        3 => alpha.cbrt(),
        _ => alpha.powf(1.0 / order as f64),
    }
}

/// `Σ_{k=0}^{m-1} C(n, m-k)`: the most terms the elimination can emit.
pub fn cp_rank_bound(shape: Shape) -> u128 {
    (1..=shape.order())
        .map(|size| binomial(shape.dim(), size))
        .sum()
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    let den = rng.random_range(1..=4);
    Rational::from_ratio(rng.random_range(lo * den..=hi * den), den)
}

fn random_support<R: Rng + ?Sized>(rng: &mut R, shape: Shape) -> SupportSet {
    let size = rng.random_range(1..=shape.order().min(shape.dim()));
    let chosen = rand::seq::index::sample(rng, shape.dim(), size);
    SupportSet::from_zero_based(chosen.iter())
}

/// A strongly symmetric tensor with `terms` random sets carrying signed
/// rational values in `[-5, 5]` (denominators up to 4).
pub fn random_strongly_symmetric<R: Rng + ?Sized>(
    rng: &mut R,
    shape: Shape,
    terms: usize,
) -> SubsetTensor<Rational> {
    let mut a = SubsetTensor::zeros(shape);
    for _ in 0..terms {
        let set = random_support(rng, shape);
        let value = random_rational(rng, -5, 5);
        a.insert(set, value).expect("generated set fits the shape");
    }
    a
}

/// A nonnegative, strongly symmetric, hierarchically dominated tensor.
///
/// Reconstructs random nonnegative binary terms, then walks the levels from
/// `m - 1` down to 1 adding a nonnegative term on every set whose value
/// falls short of its superset sum (plus random slack). Added terms only
/// raise lower levels, so earlier repairs stay valid. The result is
/// confirmed with [`check_hierarchical_dominance`] and redrawn if it fails.
pub fn random_hierarchically_dominated<R: Rng + ?Sized>(
    rng: &mut R,
    shape: Shape,
    terms: usize,
) -> SubsetTensor<Rational> {
    let m = shape.order();
    loop {
        let mut d = Decomposition {
            shape,
            terms: Vec::new(),
        };
        for _ in 0..terms {
            d.terms.push(Term {
                coefficient: random_rational(rng, 0, 4),
                support: random_support(rng, shape),
            });
        }
        let mut a = reconstruct(&d);
        for size in (1..m).rev() {
            for set in SupportSet::combinations(shape.dim(), size) {
                let supersets: Rational = a
                    .level(size + 1)
                    .filter(|(s, _)| set.is_subset_of(s))
                    .fold(Rational::from_i64(0), |acc, (_, v)| acc + v.clone());
                let current = a.get(&set);
                let needs_repair = current < supersets;
                if needs_repair || (!current.is_negligible() && rng.random_bool(0.3)) {
                    let deficit = if needs_repair {
                        supersets - current
                    } else {
                        Rational::from_i64(0)
                    };
                    let lift = deficit + random_rational(rng, 0, 2);
                    for sub in set.nonempty_subsets() {
                        a.add_at(sub, &lift);
                    }
                }
            }
        }
        if check_hierarchical_dominance(&a).passed() {
            return a;
        }
    }
}
