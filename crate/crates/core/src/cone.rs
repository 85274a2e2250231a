//! The tensor inner product, sampled copositivity and the CP/copositive
//! pairing.
//!
//! Copositivity is never decided here. A grid check either finds a
//! nonnegative `x` with `B x^m < 0` or reports that none exists among the
//! points it looked at.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::elimination::{reconstruct, to_cp_factors, Decomposition};
use crate::error::{ConeError, TensorError};
use crate::index::binomial;
use crate::report::{CheckReport, Condition, Violation};
use crate::scalar::{Scalar, FLOAT_EPS};
use crate::tensor::{SymTensor, SymmetricForm};

/// `A • B = Σ_{i1…im} a_{i1…im} b_{i1…im}` over all `n^m` tuples, computed
/// over canonical representatives weighted by their orbit sizes.
pub fn inner_product<T: Scalar>(a: &SymTensor<T>, b: &SymTensor<T>) -> Result<T, TensorError> {
    if a.shape() != b.shape() {
        return Err(TensorError::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let (small, large) = if a.nnz() <= b.nnz() { (a, b) } else { (b, a) };
    let mut total = T::zero();
    for (index, value) in small.entries() {
        let other = large.get(index);
        if !other.is_zero() {
            total = total + T::from_u128(index.orbit_size()) * value.clone() * other;
        }
    }
    Ok(total)
}

/// The points `k / d` of the standard simplex in `ℝ^n_+`, `Σ k_i = d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimplexGrid {
    pub dim: usize,
    pub resolution: usize,
}

impl SimplexGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self, ConeError> {
        if resolution == 0 {
            return Err(ConeError::ZeroResolution);
        }
        Ok(Self { dim, resolution })
    }

    /// `C(d + n - 1, n - 1)`.
    pub fn len(&self) -> u128 {
        binomial(self.resolution + self.dim - 1, self.dim - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// Integer compositions `k` of the resolution into `dim` parts, in
    /// reverse lexicographic order (all mass on the first coordinate first).
    pub fn compositions(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.dim;
        let d = self.resolution;
        let mut current = Some({
            let mut k = vec![0; n];
            if n > 0 {
                k[0] = d;
            }
            k
        });
        std::iter::from_fn(move || {
            let out = current.take()?;
            // Next composition: find the rightmost nonzero part before the
            // last slot, move one unit right and sweep the tail onto it.
            let mut next = out.clone();
            if n >= 2 {
                if let Some(pos) = (0..n - 1).rev().find(|&i| next[i] > 0) {
                    let tail: usize = next[pos + 1..].iter().sum();
                    next[pos] -= 1;
                    for v in &mut next[pos + 1..] {
                        *v = 0;
                    }
                    next[pos + 1] = tail + 1;
                    current = Some(next);
                }
            }
            Some(out)
        })
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let d = self.resolution as f64;
        self.compositions()
            .map(move |k| k.into_iter().map(|v| v as f64 / d).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CopositivityVerdict {
    /// `B x^m < 0` at a nonnegative `x`: definitely not copositive.
    Violated { witness: Vec<f64>, value: f64 },
    /// No violation among the sampled points. Not a proof of copositivity.
    PassedAtResolution { resolution: usize, samples: usize },
}

impl CopositivityVerdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, CopositivityVerdict::Violated { .. })
    }
}

/// Evaluates `B x^m` on every grid point and stops at the first one below
/// `-FLOAT_EPS`.
pub fn copositivity_grid_check<B: SymmetricForm<f64>>(
    b: &B,
    grid: &SimplexGrid,
) -> Result<CopositivityVerdict, ConeError> {
    b.shape().check_vector_len(grid.dim)?;
    let mut samples = 0;
    for x in grid.points() {
        samples += 1;
        let value = b.contract_full(&x)?;
        if value < -FLOAT_EPS {
            return Ok(CopositivityVerdict::Violated { witness: x, value });
        }
    }
    Ok(CopositivityVerdict::PassedAtResolution {
        resolution: grid.resolution,
        samples,
    })
}

/// The grid check followed by `random_samples` seeded points drawn
/// uniformly from the simplex.
pub fn copositivity_check<B: SymmetricForm<f64>>(
    b: &B,
    grid: &SimplexGrid,
    random_samples: usize,
    seed: u64,
) -> Result<CopositivityVerdict, ConeError> {
    let verdict = copositivity_grid_check(b, grid)?;
    let CopositivityVerdict::PassedAtResolution {
        resolution,
        samples,
    } = verdict
    else {
        return Ok(verdict);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_samples {
        // Normalized exponentials are uniform on the simplex.
        let mut x: Vec<f64> = (0..grid.dim)
            .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
            .collect();
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        let value = b.contract_full(&x)?;
        if value < -FLOAT_EPS {
            return Ok(CopositivityVerdict::Violated { witness: x, value });
        }
    }
    Ok(CopositivityVerdict::PassedAtResolution {
        resolution,
        samples: samples + random_samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    /// `A • B` with `A` rebuilt from the decomposition.
    pub pairing: f64,
    /// `Σ_k B (u^(k))^m` over the CP factors.
    pub factor_sum: f64,
    pub copositivity: CopositivityVerdict,
    pub report: CheckReport,
}

/// For a CP decomposition of `A` and a grid-passing `B`, checks
/// `A • B ≥ -tol` and `A • B = Σ_k B (u^(k))^m` within `tol`.
pub fn duality_pairing_check<T: Scalar>(
    d: &Decomposition<T>,
    b: &SymTensor<f64>,
    grid: &SimplexGrid,
    tol: f64,
) -> Result<PairingReport, ConeError> {
    if b.shape() != d.shape {
        return Err(TensorError::ShapeMismatch {
            left: d.shape,
            right: b.shape(),
        }
        .into());
    }
    let factors = to_cp_factors(d)?;
    let copositivity = copositivity_grid_check(b, grid)?;
    if let CopositivityVerdict::Violated { witness, value } = copositivity {
        return Err(ConeError::NotCopositive { witness, value });
    }
    let a = reconstruct(d).to_dense().to_f64();
    let pairing = inner_product(&a, b)?;
    let mut factor_sum = 0.0;
    for u in &factors.factors {
        factor_sum += b.contract_full(u)?;
    }
    let mut violations = Vec::new();
    if pairing < -tol {
        violations.push(Violation {
            condition: Condition::PairingSign,
            witness: Vec::new(),
            lhs: pairing,
            rhs: 0.0,
        });
    }
    if (pairing - factor_sum).abs() > tol {
        violations.push(Violation {
            condition: Condition::PairingIdentity,
            witness: Vec::new(),
            lhs: pairing,
            rhs: factor_sum,
        });
    }
    Ok(PairingReport {
        pairing,
        factor_sum,
        copositivity,
        report: CheckReport::from_violations(violations),
    })
}

/// The tensor with every entry equal to one (`B x^m = (Σ x_i)^m`).
pub fn all_ones<T: Scalar>(shape: crate::index::Shape) -> SymTensor<T> {
    let mut out = SymTensor::zeros(shape);
    for index in shape.canonical_indices() {
        out.insert(index, T::one())
            .expect("canonical index fits the shape");
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::elimination::eliminate;
    use crate::index::Shape;
    use crate::scalar::Rational;
    use crate::tensor::{rank_one, SubsetTensor};

    fn shape(m: usize, n: usize) -> Shape {
        Shape::new(m, n).unwrap()
    }

    /// Sum over all n^m tuples, enumerated explicitly.
    fn brute_inner(a: &SymTensor<f64>, b: &SymTensor<f64>) -> f64 {
        let (m, n) = (a.shape().order(), a.shape().dim());
        let mut total = 0.0;
        for flat in 0..n.pow(m as u32) {
            let mut raw = Vec::with_capacity(m);
            let mut rest = flat;
            for _ in 0..m {
                raw.push(rest % n + 1);
                rest /= n;
            }
            total += a.get_raw(&raw).unwrap() * b.get_raw(&raw).unwrap();
        }
        total
    }

    #[test]
    fn inner_product_examples() {
        let e1 = rank_one(&[1.0, 0.0], 2).unwrap();
        assert_eq!(inner_product(&e1, &e1).unwrap(), 1.0);

        let u = rank_one(&[1.0, 1.0], 3).unwrap();
        let v = rank_one(&[1.0, 0.0], 3).unwrap();
        assert_eq!(inner_product(&u, &v).unwrap(), 1.0);
        assert_eq!(brute_inner(&u, &v), 1.0);

        let mut a = SubsetTensor::zeros(shape(3, 3));
        a.set(&[1, 2], 2.0).unwrap();
        a.set(&[3], -1.5).unwrap();
        a.set(&[1, 2, 3], 0.5).unwrap();
        let a = a.to_dense();
        let ones = all_ones::<f64>(shape(3, 3));
        let expected = a.contract_full(&[1.0, 1.0, 1.0]).unwrap();
        assert!((inner_product(&a, &ones).unwrap() - expected).abs() < 1e-12);
        assert!((brute_inner(&a, &ones) - expected).abs() < 1e-12);
    }

    #[test]
    fn inner_product_shape_mismatch() {
        let a = all_ones::<f64>(shape(2, 2));
        let b = all_ones::<f64>(shape(3, 2));
        assert!(matches!(
            inner_product(&a, &b),
            Err(TensorError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn grid_enumeration() {
        let grid = SimplexGrid::new(3, 2).unwrap();
        let all: Vec<Vec<usize>> = grid.compositions().collect();
        assert_eq!(all.len() as u128, grid.len());
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|k| k.iter().sum::<usize>() == 2));
        let distinct: BTreeSet<Vec<usize>> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 6);
        assert_eq!(
            SimplexGrid::new(10, 6).unwrap().compositions().count(),
            5005
        );
        assert_eq!(SimplexGrid::new(1, 4).unwrap().compositions().count(), 1);
        assert!(matches!(
            SimplexGrid::new(3, 0),
            Err(ConeError::ZeroResolution)
        ));
    }

    #[test]
    fn grid_violation_on_indefinite_matrix() {
        let mut b = SymTensor::zeros(shape(2, 2));
        b.set(&[1, 1], 1.0).unwrap();
        b.set(&[2, 2], 1.0).unwrap();
        b.set(&[1, 2], -3.0).unwrap();
        let verdict = copositivity_grid_check(&b, &SimplexGrid::new(2, 2).unwrap()).unwrap();
        assert_eq!(
            verdict,
            CopositivityVerdict::Violated {
                witness: vec![0.5, 0.5],
                value: -1.0
            }
        );
    }

    #[test]
    fn grid_passes_nonnegative_and_identity() {
        let grid = SimplexGrid::new(3, 5).unwrap();
        let ones = all_ones::<f64>(shape(3, 3));
        assert_eq!(
            copositivity_grid_check(&ones, &grid).unwrap(),
            CopositivityVerdict::PassedAtResolution {
                resolution: 5,
                samples: 21
            }
        );
        let mut id = SymTensor::zeros(shape(2, 3));
        for i in 1..=3 {
            id.set(&[i, i], 1.0).unwrap();
        }
        let v = copositivity_check(&id, &grid, 100, 7).unwrap();
        assert_eq!(
            v,
            CopositivityVerdict::PassedAtResolution {
                resolution: 5,
                samples: 121
            }
        );
    }

    #[test]
    fn pairing_with_identity() {
        let mut a = SubsetTensor::zeros(shape(2, 2));
        a.set(&[1], Rational::from_i64(1)).unwrap();
        let (d, _) = eliminate(&a, false).unwrap();
        let mut id = SymTensor::zeros(shape(2, 2));
        id.set(&[1, 1], 1.0).unwrap();
        id.set(&[2, 2], 1.0).unwrap();
        let r = duality_pairing_check(&d, &id, &SimplexGrid::new(2, 6).unwrap(), 1e-8).unwrap();
        assert_eq!(r.pairing, 1.0);
        assert_eq!(r.factor_sum, 1.0);
        assert!(r.report.passed());
    }

    #[test]
    fn pairing_rejects_grid_violation_and_negative_terms() {
        let mut a = SubsetTensor::zeros(shape(2, 2));
        a.set(&[1], Rational::from_i64(1)).unwrap();
        let (d, _) = eliminate(&a, false).unwrap();
        let mut b = SymTensor::zeros(shape(2, 2));
        b.set(&[1, 1], 1.0).unwrap();
        b.set(&[2, 2], 1.0).unwrap();
        b.set(&[1, 2], -3.0).unwrap();
        let grid = SimplexGrid::new(2, 2).unwrap();
        assert!(matches!(
            duality_pairing_check(&d, &b, &grid, 1e-8),
            Err(ConeError::NotCopositive { .. })
        ));

        let mut signed = SubsetTensor::zeros(shape(2, 2));
        signed.set(&[1, 2], Rational::from_i64(1)).unwrap();
        let (d, _) = eliminate(&signed, false).unwrap();
        let ones = all_ones::<f64>(shape(2, 2));
        assert!(matches!(
            duality_pairing_check(&d, &ones, &grid, 1e-8),
            Err(ConeError::NotCpDecomposition(_))
        ));
    }
}
