//! Scalar backends.
//!
//! Two number types can carry tensor entries: exact big rationals and `f64`.
//! Every comparison the algorithms branch on goes through this trait, so the
//! rational backend decides "is this entry zero?" exactly while the float
//! backend applies [`FLOAT_EPS`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Zero tolerance of the float backend.
pub const FLOAT_EPS: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;
    const NAME: &'static str;

    fn from_i64(value: i64) -> Self;

    fn from_u128(value: u128) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses an integer, a fraction `p/q` or a decimal.
    fn parse_token(token: &str) -> Option<Self>;

    /// Text form accepted back by [`Scalar::parse_token`].
    fn render(&self) -> String;

    /// Zero test used by every branch on "entry is nonzero".
    fn is_negligible(&self) -> bool;

    /// Strictly below zero beyond tolerance.
    fn is_negative(&self) -> bool;

    /// Strictly above zero beyond tolerance.
    fn is_positive(&self) -> bool;

    /// `self ≥ rhs` up to the backend tolerance.
    fn dominates(&self, rhs: &Self) -> bool;

    fn abs_value(&self) -> Self;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const NAME: &'static str = "rational";

    fn from_i64(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }

    fn from_u128(value: u128) -> Self {
        Rational::from_integer(BigInt::from(value))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_token(token: &str) -> Option<Self> {
        if let Some((num, den)) = token.split_once('/') {
            let num: BigInt = parse_signed_integer(num)?;
            let den: BigInt = parse_signed_integer(den)?;
            if den.is_zero() {
                return None;
            }
            return Some(Rational::new(num, den));
        }
        if let Some((int_part, frac_part)) = token.split_once('.') {
            let (negative, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            if int_digits.is_empty() && frac_part.is_empty() {
                return None;
            }
            let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
            if !all_digits(int_digits) || !all_digits(frac_part) {
                return None;
            }
            let digits = format!("{int_digits}{frac_part}");
            let num: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().ok()?
            };
            let den = num_traits::pow(BigInt::from(10), frac_part.len());
            let value = Rational::new(num, den);
            return Some(if negative { -value } else { value });
        }
        parse_signed_integer(token).map(Rational::from_integer)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn dominates(&self, rhs: &Self) -> bool {
        self >= rhs
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

fn parse_signed_integer(token: &str) -> Option<BigInt> {
    let digits = token
        .strip_prefix('-')
        .or_else(|| token.strip_prefix('+'))
        .unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const NAME: &'static str = "float";

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn from_u128(value: u128) -> Self {
        value as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_token(token: &str) -> Option<Self> {
        let value = match token.split_once('/') {
            Some((num, den)) => {
                let num: f64 = num.parse().ok()?;
                let den: f64 = den.parse().ok()?;
                if den == 0.0 {
                    return None;
                }
                num / den
            }
            None => token.parse().ok()?,
        };
        value.is_finite().then_some(value)
    }

    fn render(&self) -> String {
        // Debug keeps a decimal point ("1.0") so the token re-parses as a float.
        format!("{self:?}")
    }

    fn is_negligible(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }

    fn is_negative(&self) -> bool {
        *self < -FLOAT_EPS
    }

    fn is_positive(&self) -> bool {
        *self > FLOAT_EPS
    }

    fn dominates(&self, rhs: &Self) -> bool {
        *self >= *rhs - FLOAT_EPS
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

/// `base^exp` by repeated multiplication.
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}
