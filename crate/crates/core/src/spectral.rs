//! Real H- and Z-eigenpairs of symmetric tensors.
//!
//! The iterations are verification-grade: they find extremal pairs, and
//! every pair they return has passed the residual verifier for its
//! eigen-equation. The verifiers are the contract; the iterations are only
//! one way to produce candidates.
//!
//! * H-eigenpair: `A x^{m-1} = λ x^{[m-1]}`, `x ≠ 0` real.
//! * Z-eigenpair: `A x^{m-1} = λ x`, `xᵀx = 1` real.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::elimination::CpFactorization;
use crate::error::SpectralError;
use crate::report::{CheckReport, Condition, Violation};
use crate::tensor::{power, SymTensor, SymmetricForm};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HEigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZEigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
}

/// Outcome of an eigen-equation residual check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub accepted: bool,
    /// `‖A x^{m-1} − λ·(x^{[m-1]} or x)‖∞`.
    pub residual: f64,
    /// λ recovered from the tensor alone: `(A x^{m-1})_j / x_j^{m-1}` at the
    /// largest `|x_j|` for H, `A x^m` for Z.
    pub recovered_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationConfig {
    pub max_iters: usize,
    /// Stop when the iterate moves less than this (∞-norm).
    pub tolerance: f64,
    /// Accept a pair only when its residual is at most this.
    pub residual_tolerance: f64,
    /// Z-iteration shift; derived from the entries when `None`.
    pub shift: Option<f64>,
    pub seed: u64,
    /// Number of seeded starts used by the multi-start checks.
    pub starts: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tolerance: 1e-10,
            residual_tolerance: 1e-8,
            shift: None,
            seed: 0,
            starts: 8,
        }
    }
}

impl IterationConfig {
    fn validate(&self) -> Result<(), SpectralError> {
        if self.max_iters == 0 {
            return Err(SpectralError::BadConfig("max_iters must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.residual_tolerance > 0.0) {
            return Err(SpectralError::BadConfig("tolerances must be positive"));
        }
        Ok(())
    }
}

fn max_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn largest_component(x: &[f64]) -> usize {
    (0..x.len())
        .max_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
        .unwrap_or(0)
}

pub fn verify_h_eigenpair<A: SymmetricForm<f64>>(
    a: &A,
    pair: &HEigenpair,
    tol: f64,
) -> Result<Verification, SpectralError> {
    let m = a.shape().order();
    if max_norm(&pair.x) == 0.0 {
        return Err(SpectralError::ZeroVector);
    }
    let ax = a.contract_once(&pair.x)?;
    let xp = power(&pair.x, m - 1);
    let residual = ax
        .iter()
        .zip(&xp)
        .fold(0.0_f64, |acc, (l, r)| acc.max((l - pair.lambda * r).abs()));
    let j = largest_component(&pair.x);
    Ok(Verification {
        accepted: residual <= tol,
        residual,
        recovered_lambda: ax[j] / xp[j],
    })
}

/// Checks the Z-equation and `λ = A x^m`; `x` must be unit within `tol`.
pub fn verify_z_eigenpair<A: SymmetricForm<f64>>(
    a: &A,
    pair: &ZEigenpair,
    tol: f64,
) -> Result<Verification, SpectralError> {
    let norm2 = dot(&pair.x, &pair.x);
    if (norm2 - 1.0).abs() > tol {
        return Err(SpectralError::NotUnitNorm(norm2));
    }
    let ax = a.contract_once(&pair.x)?;
    let residual = ax.iter().zip(&pair.x).fold(0.0_f64, |acc, (l, xi)| {
        acc.max((l - pair.lambda * xi).abs())
    });
    let recovered = a.contract_full(&pair.x)?;
    Ok(Verification {
        accepted: residual <= tol && (recovered - pair.lambda).abs() <= tol,
        residual,
        recovered_lambda: recovered,
    })
}

/// An H-eigenpair together with how the iteration behaved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HIteration {
    pub pair: HEigenpair,
    pub iterations: usize,
    pub residual: f64,
    /// Steps where `A x^m / Σ x_i^m` decreased (flagged, not fatal).
    pub quotient_decreases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZIteration {
    pub pair: ZEigenpair,
    pub iterations: usize,
    pub residual: f64,
    pub shift: f64,
}

/// Power iteration for the dominant H-eigenpair of a nonnegative tensor,
/// starting from a seeded positive vector.
pub fn h_eigenpair_power<A: SymmetricForm<f64>>(
    a: &A,
    cfg: &IterationConfig,
) -> Result<HIteration, SpectralError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = positive_start(&mut rng, a.shape().dim());
    h_eigenpair_power_from(a, start, cfg)
}

/// Power iteration `x ← ((A + I) x^{m-1})^{[1/(m-1)]}`, normalized to
/// `‖x‖∞ = 1`. The unit diagonal shift keeps periodic (bipartite-like)
/// patterns from oscillating and does not move eigenvectors.
pub fn h_eigenpair_power_from<A: SymmetricForm<f64>>(
    a: &A,
    start: Vec<f64>,
    cfg: &IterationConfig,
) -> Result<HIteration, SpectralError> {
    cfg.validate()?;
    let shape = a.shape();
    shape.check_vector_len(start.len())?;
    let values = a.stored_values();
    if values.iter().any(|(_, v)| *v < 0.0) {
        return Err(SpectralError::NotNonnegative);
    }
    if values.iter().all(|(_, v)| *v == 0.0) {
        return Err(SpectralError::ZeroTensor);
    }
    if start.iter().any(|v| *v <= 0.0) {
        return Err(SpectralError::BadConfig(
            "H-iteration start must be positive",
        ));
    }
    let m = shape.order();
    let root = 1.0 / (m - 1) as f64;
    let scale = max_norm(&start);
    let mut x: Vec<f64> = start.iter().map(|v| v / scale).collect();
    let mut quotient_decreases = 0;
    let mut last_quotient = f64::NEG_INFINITY;
    let mut last = (f64::NAN, f64::INFINITY);
    for iteration in 1..=cfg.max_iters {
        let ax = a.contract_once(&x)?;
        let xp = power(&x, m - 1);
        let quotient = dot(&ax, &x) / x.iter().map(|v| v.powi(m as i32)).sum::<f64>();
        if quotient < last_quotient - 1e-12 * last_quotient.abs().max(1.0) {
            quotient_decreases += 1;
        }
        last_quotient = quotient;

        let shifted: Vec<f64> = ax.iter().zip(&xp).map(|(l, r)| l + r).collect();
        let mut next: Vec<f64> = shifted.iter().map(|v| v.max(0.0).powf(root)).collect();
        let norm = max_norm(&next);
        next.iter_mut().for_each(|v| *v /= norm);
        let step = max_diff(&next, &x);
        x = next;

        let pair = HEigenpair {
            lambda: 0.0,
            x: x.clone(),
        };
        let probe = verify_h_eigenpair(a, &pair, cfg.residual_tolerance)?;
        let pair = HEigenpair {
            lambda: probe.recovered_lambda,
            x: x.clone(),
        };
        let check = verify_h_eigenpair(a, &pair, cfg.residual_tolerance)?;
        last = (pair.lambda, check.residual);
        if step <= cfg.tolerance && check.accepted {
            return Ok(HIteration {
                pair,
                iterations: iteration,
                residual: check.residual,
                quotient_decreases,
            });
        }
    }
    Err(SpectralError::NoConvergence {
        iterations: cfg.max_iters,
        residual: last.1,
        lambda: last.0,
        x,
    })
}

/// Default Z-shift: `(m − 1) · Σ |a_{i1…im}|` over all `n^m` tuples, an
/// upper bound on `(m − 1) max_{‖x‖=1} ρ(A x^{m−2})`.
pub fn default_shift<A: SymmetricForm<f64>>(a: &A) -> f64 {
    let m = a.shape().order();
    let ones = vec![1.0; a.shape().dim()];
    let abs_total = abs_tensor(a).contract_full(&ones).unwrap_or(0.0);
    (m - 1) as f64 * abs_total
}

fn abs_tensor<A: SymmetricForm<f64>>(a: &A) -> SymTensor<f64> {
    let shape = a.shape();
    let mut out = SymTensor::zeros(shape);
    for index in shape.canonical_indices() {
        let v = a.entry(&index);
        if v != 0.0 {
            out.insert(index, v.abs())
                .expect("canonical index fits the shape");
        }
    }
    out
}

/// Shifted symmetric power iteration from a seeded start on the unit sphere,
/// negated if needed so that `A x^m ≥ 0`.
pub fn z_eigenpair_power<A: SymmetricForm<f64>>(
    a: &A,
    cfg: &IterationConfig,
) -> Result<ZIteration, SpectralError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start = sphere_start(&mut rng, a.shape().dim());
    if a.contract_full(&start)? < 0.0 {
        start.iter_mut().for_each(|v| *v = -*v);
    }
    z_eigenpair_power_from(a, start, cfg)
}

/// `x ← normalize(A x^{m-1} + α x)`, `λ = A x^m`.
pub fn z_eigenpair_power_from<A: SymmetricForm<f64>>(
    a: &A,
    start: Vec<f64>,
    cfg: &IterationConfig,
) -> Result<ZIteration, SpectralError> {
    cfg.validate()?;
    a.shape().check_vector_len(start.len())?;
    let norm = dot(&start, &start).sqrt();
    if norm == 0.0 {
        return Err(SpectralError::ZeroVector);
    }
    let shift = cfg.shift.unwrap_or_else(|| default_shift(a));
    let mut x: Vec<f64> = start.iter().map(|v| v / norm).collect();
    let mut last = (f64::NAN, f64::INFINITY);
    for iteration in 1..=cfg.max_iters {
        let ax = a.contract_once(&x)?;
        let mut next: Vec<f64> = ax.iter().zip(&x).map(|(l, xi)| l + shift * xi).collect();
        let norm = dot(&next, &next).sqrt();
        if norm == 0.0 {
            return Err(SpectralError::ZeroVector);
        }
        next.iter_mut().for_each(|v| *v /= norm);
        let step = max_diff(&next, &x);
        x = next;
        let lambda = a.contract_full(&x)?;
        let pair = ZEigenpair {
            lambda,
            x: x.clone(),
        };
        let check = verify_z_eigenpair(a, &pair, cfg.residual_tolerance)?;
        last = (lambda, check.residual);
        if step <= cfg.tolerance && check.accepted {
            return Ok(ZIteration {
                pair,
                iterations: iteration,
                residual: check.residual,
                shift,
            });
        }
    }
    Err(SpectralError::NoConvergence {
        iterations: cfg.max_iters,
        residual: last.1,
        lambda: last.0,
        x,
    })
}

fn positive_start<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(0.1..=1.0)).collect()
}

fn sphere_start<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Multi-start spectral evidence for a CP tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub h_pairs: Vec<HEigenpair>,
    pub z_pairs: Vec<ZEigenpair>,
    /// Starts (H and Z together) that hit `max_iters` without an accepted pair.
    pub non_converged: Vec<String>,
    pub report: CheckReport,
}

/// Runs `cfg.starts` seeded H- and Z-iterations and checks the sign
/// properties a CP tensor must show:
///
/// * every H-eigenvalue is ≥ −tol;
/// * even `m`: every Z-eigenvalue is ≥ −tol;
/// * odd `m`: a Z-pair with λ > tol has `x ≥ −tol`, with λ < −tol has `x ≤ tol`.
///
/// `factors` must reproduce `a`; a mismatch is reported as a violation.
pub fn check_cp_spectral_properties<A: SymmetricForm<f64>>(
    a: &A,
    factors: &CpFactorization,
    cfg: &IterationConfig,
) -> Result<SpectralReport, SpectralError> {
    cfg.validate()?;
    let shape = a.shape();
    let tol = cfg.residual_tolerance;
    let mut violations = Vec::new();

    let rebuilt = factors.to_dense();
    for index in shape.canonical_indices() {
        let lhs = a.entry(&index);
        let rhs = rebuilt.get(&index);
        if (lhs - rhs).abs() > tol.max(1e-10 * lhs.abs()) {
            violations.push(Violation {
                condition: Condition::FactorReconstruction,
                witness: vec![index.one_based()],
                lhs,
                rhs,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut h_pairs = Vec::new();
    let mut z_pairs = Vec::new();
    let mut non_converged = Vec::new();
    let nonnegative = a.stored_values().iter().all(|(_, v)| *v >= 0.0);
    let nonzero = a.stored_values().iter().any(|(_, v)| *v != 0.0);

    for start in 0..cfg.starts {
        let x0 = positive_start(&mut rng, shape.dim());
        let z0 = sphere_start(&mut rng, shape.dim());
        if nonnegative && nonzero {
            match h_eigenpair_power_from(a, x0, cfg) {
                Ok(it) => {
                    if it.pair.lambda < -tol {
                        violations.push(Violation {
                            condition: Condition::HEigenvalueSign,
                            witness: vec![vec![start + 1]],
                            lhs: it.pair.lambda,
                            rhs: 0.0,
                        });
                    }
                    h_pairs.push(it.pair);
                }
                Err(SpectralError::NoConvergence { residual, .. }) => {
                    non_converged.push(format!("h start {}: residual {residual:e}", start + 1));
                }
                Err(e) => return Err(e),
            }
        }
        match z_eigenpair_power_from(a, z0, cfg) {
            Ok(it) => {
                let pair = &it.pair;
                if shape.order() % 2 == 0 {
                    if pair.lambda < -tol {
                        violations.push(Violation {
                            condition: Condition::ZEigenvalueSign,
                            witness: vec![vec![start + 1]],
                            lhs: pair.lambda,
                            rhs: 0.0,
                        });
                    }
                } else {
                    let sign = if pair.lambda > tol {
                        1.0
                    } else if pair.lambda < -tol {
                        -1.0
                    } else {
                        0.0
                    };
                    if let Some(worst) = pair
                        .x
                        .iter()
                        .map(|v| sign * v)
                        .filter(|_| sign != 0.0)
                        .min_by(f64::total_cmp)
                    {
                        if worst < -tol {
                            violations.push(Violation {
                                condition: Condition::ZEigenvectorSign,
                                witness: vec![vec![start + 1]],
                                lhs: worst,
                                rhs: 0.0,
                            });
                        }
                    }
                }
                z_pairs.push(it.pair);
            }
            Err(SpectralError::NoConvergence { residual, .. }) => {
                non_converged.push(format!("z start {}: residual {residual:e}", start + 1));
            }
            Err(e) => return Err(e),
        }
    }

    Ok(SpectralReport {
        h_pairs,
        z_pairs,
        non_converged,
        report: CheckReport::from_violations(violations),
    })
}
