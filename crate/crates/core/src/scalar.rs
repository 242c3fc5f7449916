//! Numeric modes.
//!
//! Every computation in the crate is generic over [`Scalar`]. Two modes are
//! provided: [`Rational`] (arbitrary precision, no rounding) and `f64`.
//! Callers pick one per computation; the two are never mixed.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number backed by arbitrary-precision integers.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Sum
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_rational(value: &Rational) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    fn to_f64(&self) -> f64;

    fn magnitude(&self) -> Self;

    /// Slack below which a difference is treated as zero: `0` for exact
    /// arithmetic, `1e-9` for floats.
    fn tolerance() -> Self;

    /// Parses an integer, a decimal (`-0.125`, `1e-3`) or a fraction (`p/q`).
    fn parse_scalar(text: &str) -> Result<Self>;

    /// `self > other` beyond the mode's tolerance.
    fn exceeds(&self, other: &Self) -> bool {
        self.clone() - other > Self::tolerance()
    }

    fn is_negligible(&self) -> bool {
        self.magnitude() <= Self::tolerance()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        parse_rational(text)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_rational(value: &Rational) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn tolerance() -> Self {
        1e-9
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('/') {
            return parse_rational(text).map(|r| Scalar::to_f64(&r));
        }
        f64::from_str(text)
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Argument(format!("not a number: {text:?}")))
    }
}

/// Parses `p/q`, integers and decimals (with optional exponent) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Argument(format!("not a rational number: {text:?}"));
    if let Some((numer, denom)) = text.split_once('/') {
        let numer = BigInt::from_str(numer.trim()).map_err(|_| bad())?;
        let denom = BigInt::from_str(denom.trim()).map_err(|_| bad())?;
        if denom.is_zero() {
            return Err(Error::Argument(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(numer, denom));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let exp = i32::from_str(&text[pos + 1..]).map_err(|_| bad())?;
            (&text[..pos], exp)
        }
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Ok(if negative { -value } else { value })
}

/// `p/q (≈decimal)` rendering used by reports and the CLI.
pub fn describe_exact(value: &Rational) -> String {
    if value.is_integer() {
        format!("{value}")
    } else {
        format!("{value} (≈{:.6})", Scalar::to_f64(value))
    }
}

/// Parses a scalar in whichever mode the caller selected.
pub fn parse<S: Scalar>(text: &str) -> Result<S> {
    S::parse_scalar(text)
}

/// Sum of a slice; helper for the many `Σ_i` in this crate.
pub fn sum<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> S {
    values.into_iter().fold(S::zero(), |acc, v| acc + v)
}

pub fn is_one<S: Scalar>(value: &S) -> bool {
    if S::EXACT {
        value.is_one()
    } else {
        (value.clone() - S::one()).magnitude().to_f64() <= 1e-12
    }
}
