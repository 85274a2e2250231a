//! Completely positive symmetric tensors: storage, structural necessary
//! conditions, CP decomposition by elimination, spectral checks and cone
//! duality checks.

pub mod cases;
pub mod checks;
pub mod cli;
pub mod cone;
pub mod elimination;
pub mod error;
pub mod index;
pub mod io;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod tensor;

pub use error::{CheckError, ConeError, EliminationError, ParseError, SpectralError, TensorError};
pub use index::{MultiIndex, Shape, SupportSet};
pub use report::{CheckReport, Condition, Violation};
pub use scalar::{Rational, Scalar};
pub use tensor::{SubsetTensor, SymTensor, SymmetricForm};
