//! Scalar rings for operator arithmetic: exact rationals and 64-bit floats.
//!
//! All identity verification runs over [`Rational`]; floating point is used
//! only for spectral radii and forward ODE integration. There is no mixed
//! mode: a computation picks one ring and stays in it.

use std::fmt;
use std::ops::{Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Common trait bound for matrix entries.
///
/// Implemented by [`Rational`] and `f64` via the blanket impl; nothing else
/// is expected to satisfy it.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + PartialOrd
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Neg<Output = Self>
        + Sub<Output = Self>
        + Send
        + Sync
        + 'static
{
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"a/b"`, integer, and decimal (`"0.25"`) forms into an exact
/// rational. Decimals are read digit-for-digit, so `"0.3"` is exactly 3/10.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    let err = || ParseRationalError {
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((numer, denom)) = s.split_once('/') {
        let n: BigInt = numer.trim().parse().map_err(|_| err())?;
        let d: BigInt = denom.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let frac: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
        let magnitude = int_digits.abs() * &scale + frac;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(n))
}

/// Lossy conversion used when switching a rational model into float mode.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().expect("rational should convert to f64")
}
