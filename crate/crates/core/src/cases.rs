//! The six embedded reference tensors (`m = 3` and `m = 4`, `n = 10`) and
//! their expected factor tables.

use serde::Serialize;

use crate::elimination::{cp_rank_bound, eliminate, factor_value, Decomposition};
use crate::error::{EliminationError, ParseError};
use crate::index::SupportSet;
use crate::io::{parse_factor_table, parse_tensor, TensorFile};
use crate::scalar::{Rational, Scalar};
use crate::tensor::SubsetTensor;

/// Tables print four decimals.
pub const TABLE_TOLERANCE: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceCase {
    pub name: &'static str,
    /// `.sst` text.
    pub tensor: &'static str,
    /// `value : indices` lines.
    pub table: &'static str,
}

macro_rules! case {
    ($name:literal) => {
        ReferenceCase {
            name: $name,
            tensor: include_str!(concat!("../fixtures/ex_", $name, ".sst")),
            table: include_str!(concat!("../fixtures/table_", $name, ".txt")),
        }
    };
}

pub const CASES: [ReferenceCase; 6] = [
    case!("m3_1"),
    case!("m3_2"),
    case!("m3_3"),
    case!("m4_1"),
    case!("m4_2"),
    case!("m4_3"),
];

impl ReferenceCase {
    pub fn load(&self) -> SubsetTensor<Rational> {
        match parse_tensor::<Rational>(self.tensor) {
            Ok(TensorFile::Subset(a)) => a,
            other => panic!(
                "embedded case {} is not a valid sst file: {other:?}",
                self.name
            ),
        }
    }

    pub fn expected(&self) -> Vec<(f64, SupportSet)> {
        parse_factor_table(self.table).unwrap_or_else(|e: ParseError| {
            panic!("embedded table {} is malformed: {e}", self.name)
        })
    }
}

/// Result of decomposing one reference case and diffing it against its table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseOutcome {
    pub name: &'static str,
    pub terms: usize,
    pub expected_terms: usize,
    pub residual_zero: bool,
    pub rank_bound: u128,
    /// First disagreement with the table, if any.
    pub mismatch: Option<String>,
    #[serde(skip)]
    pub decomposition: Decomposition<Rational>,
}

impl CaseOutcome {
    pub fn reproduced(&self) -> bool {
        self.residual_zero && self.mismatch.is_none()
    }
}

pub fn reproduce(case: &ReferenceCase) -> Result<CaseOutcome, EliminationError> {
    let a = case.load();
    let (d, trace) = eliminate(&a, false)?;
    let m = a.shape().order();
    let mut got = Vec::with_capacity(d.len());
    for (position, term) in d.terms.iter().enumerate() {
        if Scalar::is_negative(&term.coefficient) {
            return Err(EliminationError::NegativeCoefficient {
                position,
                support: term.support,
                coefficient: term.coefficient.render(),
            });
        }
        got.push((factor_value(&term.coefficient, m), term.support));
    }
    let expected = case.expected();
    Ok(CaseOutcome {
        name: case.name,
        terms: d.len(),
        expected_terms: expected.len(),
        residual_zero: trace.residual.is_zero(),
        rank_bound: cp_rank_bound(a.shape()),
        mismatch: compare_tables(&got, &expected, TABLE_TOLERANCE).err(),
        decomposition: d,
    })
}

/// Compares two `(value, support)` multisets, values within `tol`.
pub fn compare_tables(
    got: &[(f64, SupportSet)],
    expected: &[(f64, SupportSet)],
    tol: f64,
) -> Result<(), String> {
    let sorted = |rows: &[(f64, SupportSet)]| {
        let mut rows = rows.to_vec();
        rows.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.total_cmp(&y.0)));
        rows
    };
    let (got, expected) = (sorted(got), sorted(expected));
    for (g, e) in got.iter().zip(&expected) {
        if g.1 != e.1 {
            let (first, which) = if g.1 < e.1 {
                (g.1, "unexpected")
            } else {
                (e.1, "missing")
            };
            return Err(format!("{which} support {first}"));
        }
        if (g.0 - e.0).abs() > tol {
            return Err(format!(
                "support {}: value {:.6} vs table {}",
                g.1, g.0, e.0
            ));
        }
    }
    if got.len() != expected.len() {
        return Err(format!(
            "{} terms vs {} in the table",
            got.len(),
            expected.len()
        ));
    }
    Ok(())
}
