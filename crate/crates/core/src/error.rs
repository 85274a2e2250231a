use thiserror::Error;

use crate::index::{MultiIndex, Shape, SupportSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("dimension must be in 1..=64, got {0}")]
    BadDimension(usize),
    #[error("expected {expected} indices, found {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("index {index} outside 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index {0} repeated in a support set")]
    RepeatedIndex(usize),
    #[error("support set is empty")]
    EmptySet,
    #[error("support set {set} has more than {order} members")]
    SetTooLarge { set: SupportSet, order: usize },
    #[error("vector has length {found}, tensor dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shapes differ: {left} vs {right}")]
    ShapeMismatch { left: Shape, right: Shape },
    #[error(
        "not strongly symmetric: {first} = {first_value} but similar {second} = {second_value}"
    )]
    NotStronglySymmetric {
        first: MultiIndex,
        second: MultiIndex,
        first_value: String,
        second_value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("invalid s-duplicate: {0}")]
    InvalidDuplicate(String),
    #[error("propagation depth {depth} outside 1..={max}")]
    BadDepth { depth: usize, max: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EliminationError {
    #[error("elimination residual {0:e} exceeds tolerance")]
    ResidualNonzero(f64),
    #[error("term {position} on {support} has negative coefficient {coefficient}")]
    NegativeCoefficient {
        position: usize,
        support: SupportSet,
        coefficient: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("eigenvector is zero")]
    ZeroVector,
    #[error("eigenvector norm² is {0}, expected 1")]
    NotUnitNorm(f64),
    #[error("tensor has a negative entry; the H-iteration needs a nonnegative tensor")]
    NotNonnegative,
    #[error("tensor is identically zero")]
    ZeroTensor,
    #[error("bad iteration config: {0}")]
    BadConfig(&'static str),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        lambda: f64,
        x: Vec<f64>,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("decomposition is not a CP decomposition: {0}")]
    NotCpDecomposition(#[from] EliminationError),
    #[error("B is not copositive: B x^m = {value:e} at x = {witness:?}")]
    NotCopositive { witness: Vec<f64>, value: f64 },
    #[error("grid resolution must be positive")]
    ZeroResolution,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: duplicate entry for {what}")]
    DuplicateEntry { line: usize, what: String },
    #[error("line {line}: {source}")]
    Index { line: usize, source: TensorError },
    #[error("missing header line (`sst m n` or `dst m n`)")]
    MissingHeader,
}
