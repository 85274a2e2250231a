//! Line-oriented tensor files and decomposition rendering.
//!
//! ```text
//! # comment
//! sst 3 10          # strongly symmetric: "i1 … ik value", distinct ascending indices
//! 2 6 9 1
//! 2 5/2
//! ```
//!
//! `dst m n` files hold dense symmetric tensors with exactly `m` indices per
//! line (any order; they are canonicalized). Values are integers, fractions
//! `p/q` or decimals. Indices are 1-based.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::elimination::{factor_value, Decomposition, Term};
use crate::error::{EliminationError, ParseError};
use crate::index::{canonicalize, Shape, SupportSet};
use crate::scalar::Scalar;
use crate::tensor::{SubsetTensor, SymTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorKind {
    DenseSymmetric,
    StronglySymmetric,
}

impl TensorKind {
    pub fn tag(&self) -> &'static str {
        match self {
            TensorKind::DenseSymmetric => "dst",
            TensorKind::StronglySymmetric => "sst",
        }
    }
}

/// A parsed tensor file.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorFile<T> {
    Dense(SymTensor<T>),
    Subset(SubsetTensor<T>),
}

impl<T: Scalar> TensorFile<T> {
    pub fn kind(&self) -> TensorKind {
        match self {
            TensorFile::Dense(_) => TensorKind::DenseSymmetric,
            TensorFile::Subset(_) => TensorKind::StronglySymmetric,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            TensorFile::Dense(t) => t.shape(),
            TensorFile::Subset(t) => t.shape(),
        }
    }

    /// The dense view of either kind.
    pub fn to_dense(&self) -> SymTensor<T> {
        match self {
            TensorFile::Dense(t) => t.clone(),
            TensorFile::Subset(t) => t.to_dense(),
        }
    }
}

/// Scalar backend used to load a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Rational,
    Float,
}

impl Backend {
    /// Rational unless some value token is written as a decimal or in
    /// exponent notation.
    pub fn detect(text: &str) -> Backend {
        let mut lines = content_lines(text);
        if lines.next().is_none() {
            return Backend::Rational;
        }
        for (_, line) in lines {
            if let Some(value) = line.split_whitespace().last() {
                if value.contains(['.', 'e', 'E']) {
                    return Backend::Float;
                }
            }
        }
        Backend::Rational
    }
}

/// Non-blank lines with comments removed, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        reason: reason.into(),
    }
}

pub fn parse_tensor<T: Scalar>(text: &str) -> Result<TensorFile<T>, ParseError> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [tag, order, dim] = fields[..] else {
        return Err(syntax(header_line, "header must be `sst m n` or `dst m n`"));
    };
    let kind = match tag {
        "sst" => TensorKind::StronglySymmetric,
        "dst" => TensorKind::DenseSymmetric,
        other => {
            return Err(syntax(
                header_line,
                format!("unknown tensor kind `{other}`"),
            ))
        }
    };
    let order: usize = order
        .parse()
        .map_err(|_| syntax(header_line, format!("bad order `{order}`")))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| syntax(header_line, format!("bad dimension `{dim}`")))?;
    let shape = Shape::new(order, dim).map_err(|source| ParseError::Index {
        line: header_line,
        source,
    })?;

    let mut dense = SymTensor::zeros(shape);
    let mut subset = SubsetTensor::zeros(shape);
    let mut seen_dense = BTreeSet::new();
    let mut seen_sets = BTreeSet::new();
    for (line_no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let (value_token, index_tokens) = tokens.split_last().expect("content lines are non-blank");
        if index_tokens.is_empty() {
            return Err(syntax(
                line_no,
                "entry needs at least one index and a value",
            ));
        }
        let mut indices = Vec::with_capacity(index_tokens.len());
        for tok in index_tokens {
            let i: usize = tok
                .parse()
                .map_err(|_| syntax(line_no, format!("bad index `{tok}`")))?;
            indices.push(i);
        }
        let value = T::parse_token(value_token)
            .ok_or_else(|| syntax(line_no, format!("bad value `{value_token}`")))?;
        let index_error = |source| ParseError::Index {
            line: line_no,
            source,
        };
        match kind {
            TensorKind::StronglySymmetric => {
                if indices.len() > order {
                    return Err(syntax(
                        line_no,
                        format!("at most {order} indices per entry"),
                    ));
                }
                if indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(syntax(line_no, "indices must be distinct and ascending"));
                }
                let set = SupportSet::from_one_based(&indices, dim).map_err(index_error)?;
                if !seen_sets.insert(set) {
                    return Err(ParseError::DuplicateEntry {
                        line: line_no,
                        what: set.to_string(),
                    });
                }
                subset.insert(set, value).map_err(index_error)?;
            }
            TensorKind::DenseSymmetric => {
                let index = canonicalize(&indices, shape).map_err(index_error)?;
                if !seen_dense.insert(index.clone()) {
                    return Err(ParseError::DuplicateEntry {
                        line: line_no,
                        what: index.to_string(),
                    });
                }
                dense.insert(index, value).map_err(index_error)?;
            }
        }
    }
    Ok(match kind {
        TensorKind::StronglySymmetric => TensorFile::Subset(subset),
        TensorKind::DenseSymmetric => TensorFile::Dense(dense),
    })
}

fn join(indices: &[usize]) -> String {
    indices
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_subset<T: Scalar>(a: &SubsetTensor<T>) -> String {
    let shape = a.shape();
    let mut out = format!("sst {} {}\n", shape.order(), shape.dim());
    for (set, value) in a.iter() {
        let _ = writeln!(out, "{} {}", join(&set.one_based()), value.render());
    }
    out
}

pub fn render_dense<T: Scalar>(a: &SymTensor<T>) -> String {
    let shape = a.shape();
    let mut out = format!("dst {} {}\n", shape.order(), shape.dim());
    for (index, value) in a.entries() {
        let _ = writeln!(out, "{} {}", join(&index.one_based()), value.render());
    }
    out
}

pub fn render_tensor<T: Scalar>(file: &TensorFile<T>) -> String {
    match file {
        TensorFile::Dense(t) => render_dense(t),
        TensorFile::Subset(t) => render_subset(t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionStyle {
    /// `coefficient : support`
    Terms,
    /// `α^{1/m} : support`
    Factors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Four decimals.
    #[default]
    Table,
    /// Shortest round-trip float.
    Full,
}

/// One line per term in decomposition order.
pub fn render_decomposition<T: Scalar>(
    d: &Decomposition<T>,
    style: DecompositionStyle,
    precision: Precision,
) -> Result<String, EliminationError> {
    let m = d.shape.order();
    let mut out = String::new();
    for (
        position,
        Term {
            coefficient,
            support,
        },
    ) in d.terms.iter().enumerate()
    {
        let support = join(&support.one_based());
        match style {
            DecompositionStyle::Terms => {
                let _ = writeln!(out, "{} : {support}", coefficient.render());
            }
            DecompositionStyle::Factors => {
                if coefficient.is_negative() {
                    return Err(EliminationError::NegativeCoefficient {
                        position,
                        support: d.terms[position].support,
                        coefficient: coefficient.render(),
                    });
                }
                let value = factor_value(coefficient, m);
                let _ = match precision {
                    Precision::Table => writeln!(out, "{value:.4} : {support}"),
                    Precision::Full => writeln!(out, "{value:?} : {support}"),
                };
            }
        }
    }
    Ok(out)
}

/// Reads `value : i1 i2 …` lines (the factors style) back into pairs.
pub fn parse_factor_table(text: &str) -> Result<Vec<(f64, SupportSet)>, ParseError> {
    let mut out = Vec::new();
    for (line_no, line) in content_lines(text) {
        let (value, support) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, "expected `value : indices`"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| syntax(line_no, format!("bad value `{}`", value.trim())))?;
        let indices: Vec<usize> = support
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| syntax(line_no, format!("bad index `{t}`")))
            })
            .collect::<Result<_, _>>()?;
        let set =
            SupportSet::from_one_based(&indices, crate::index::MAX_DIM).map_err(|source| {
                ParseError::Index {
                    line: line_no,
                    source,
                }
            })?;
        out.push((value, set));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::eliminate;
    use crate::error::TensorError;
    use crate::scalar::Rational;

    #[test]
    fn parses_strongly_symmetric_entry() {
        let file = parse_tensor::<Rational>("sst 3 10\n2 6 9 1\n").unwrap();
        let TensorFile::Subset(a) = file else {
            panic!()
        };
        assert_eq!(
            a.get(&SupportSet::from_zero_based([1, 5, 8])),
            Rational::from_i64(1)
        );
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn empty_body_is_zero_tensor() {
        let file = parse_tensor::<Rational>("# nothing\nsst 4 3\n\n").unwrap();
        assert_eq!(file.shape(), Shape::new(4, 3).unwrap());
        let TensorFile::Subset(a) = file else {
            panic!()
        };
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn rejects_repeated_indices_in_sst() {
        let err = parse_tensor::<Rational>("sst 3 10\n2 2 9 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_tensor::<f64>("# only\n").unwrap_err(),
            ParseError::MissingHeader
        );
        assert!(matches!(
            parse_tensor::<f64>("xyz 3 3\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("sst 1 3\n"),
            Err(ParseError::Index { .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("sst 3 3\n1 x\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("sst 3 3\n5\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("sst 3 3\n1 4 1\n"),
            Err(ParseError::Index {
                line: 2,
                source: TensorError::IndexOutOfRange { index: 4, dim: 3 }
            })
        ));
        assert!(matches!(
            parse_tensor::<f64>("sst 3 3\n1 2 1\n1 2 3\n"),
            Err(ParseError::DuplicateEntry { line: 3, .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("dst 3 3\n1 2 2 1\n2 1 2 3\n"),
            Err(ParseError::DuplicateEntry { line: 3, .. })
        ));
        assert!(matches!(
            parse_tensor::<f64>("dst 3 3\n1 2 1\n"),
            Err(ParseError::Index {
                source: TensorError::WrongArity { .. },
                ..
            })
        ));
        assert!(matches!(
            parse_tensor::<Rational>("sst 2 3\n1 1.5e3\n"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn dense_lines_are_canonicalized() {
        let TensorFile::Dense(t) =
            parse_tensor::<Rational>("dst 3 3 # dense\n3 1 1 2/4\n").unwrap()
        else {
            panic!()
        };
        assert_eq!(t.get_raw(&[1, 3, 1]).unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(render_dense(&t), "dst 3 3\n1 1 3 1/2\n");
    }

    #[test]
    fn backend_detection() {
        assert_eq!(
            Backend::detect("sst 3 3\n1 2 3/4\n2 5\n"),
            Backend::Rational
        );
        assert_eq!(Backend::detect("sst 3 3\n1 2 0.75\n"), Backend::Float);
        assert_eq!(Backend::detect("sst 3 3\n1 2 1e-3\n"), Backend::Float);
        assert_eq!(Backend::detect(""), Backend::Rational);
    }

    #[test]
    fn render_decomposition_styles() {
        let TensorFile::Subset(a) = parse_tensor::<Rational>("sst 3 3\n1 2\n2 2\n1 2 1\n").unwrap()
        else {
            panic!()
        };
        let (d, _) = eliminate(&a, false).unwrap();
        assert_eq!(
            render_decomposition(&d, DecompositionStyle::Terms, Precision::Table).unwrap(),
            "1 : 1 2\n1 : 1\n1 : 2\n"
        );
        assert_eq!(
            render_decomposition(&d, DecompositionStyle::Factors, Precision::Table).unwrap(),
            "1.0000 : 1 2\n1.0000 : 1\n1.0000 : 2\n"
        );
        let empty = Decomposition::<Rational> {
            shape: a.shape(),
            terms: Vec::new(),
        };
        assert_eq!(
            render_decomposition(&empty, DecompositionStyle::Factors, Precision::Full).unwrap(),
            ""
        );

        let TensorFile::Subset(b) = parse_tensor::<Rational>("sst 2 2\n1 2 1\n").unwrap() else {
            panic!()
        };
        let (d, _) = eliminate(&b, false).unwrap();
        assert!(matches!(
            render_decomposition(&d, DecompositionStyle::Factors, Precision::Table),
            Err(EliminationError::NegativeCoefficient { .. })
        ));
    }

    #[test]
    fn factor_table_parsing() {
        let pairs = parse_factor_table("1.2599 : 2\n1 : 2 6 9\n").unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].1.one_based(), vec![2]);
        assert!(parse_factor_table("1.0 2 3\n").is_err());
    }
}
