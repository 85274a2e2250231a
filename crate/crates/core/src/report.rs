//! Check outcomes shared by the structural, spectral and cone checks.

use std::fmt;

use serde::Serialize;

/// Which condition a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    StrongSymmetry,
    Nonnegativity,
    ZeroPattern,
    SDuplicate,
    DiagonalMean,
    Hierarchical,
    Propagated { depth: usize },
    FactorReconstruction,
    HEigenvalueSign,
    ZEigenvalueSign,
    ZEigenvectorSign,
    PairingSign,
    PairingIdentity,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::StrongSymmetry => f.write_str("strong-symmetry"),
            Condition::Nonnegativity => f.write_str("nonnegativity"),
            Condition::ZeroPattern => f.write_str("zero-pattern"),
            Condition::SDuplicate => f.write_str("s-duplicate"),
            Condition::DiagonalMean => f.write_str("diagonal-mean"),
            Condition::Hierarchical => f.write_str("hierarchical"),
            Condition::Propagated { depth } => write!(f, "propagated(q={depth})"),
            Condition::FactorReconstruction => f.write_str("factor-reconstruction"),
            Condition::HEigenvalueSign => f.write_str("h-eigenvalue-sign"),
            Condition::ZEigenvalueSign => f.write_str("z-eigenvalue-sign"),
            Condition::ZEigenvectorSign => f.write_str("z-eigenvector-sign"),
            Condition::PairingSign => f.write_str("pairing-sign"),
            Condition::PairingIdentity => f.write_str("pairing-identity"),
        }
    }
}

/// One failed inequality: `lhs` was expected to dominate `rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    /// 1-based index tuples or sets identifying where the check failed.
    pub witness: Vec<Vec<usize>>,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.condition)?;
        for (k, w) in self.witness.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            let parts: Vec<String> = w.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        write!(f, " lhs={} rhs={}", self.lhs, self.rhs)
    }
}

/// All violations found by a check; passes iff there are none.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CheckReport {
    passed: bool,
    violations: Vec<Violation>,
}

impl CheckReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn merge(mut self, other: CheckReport) -> Self {
        self.violations.extend(other.violations);
        self.passed = self.violations.is_empty();
        self
    }
}
