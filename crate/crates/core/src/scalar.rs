//! Scalar abstraction and exact rational helpers.
//!
//! Every solver in this crate is written against [`Scalar`], an ordered field
//! described with `num-traits` bounds. The exact instantiation used throughout
//! is [`Rational`](crate::Rational) (`BigRational`); other types that meet the
//! bounds (for example `Ratio<i64>` or `f64`) compile against the same code,
//! but only the exact type carries the guarantees the oracles rely on.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

use crate::error::{Error, Result};

/// An ordered field usable by the solvers.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync
{
    /// Exact conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    fn pow_u(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

impl<T> Scalar for T where
    T: Num + Signed + Clone + PartialOrd + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync
{
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic; division by zero is reported instead of panicking.
pub fn rational_arith<S: Scalar>(a: &S, b: &S, op: ArithOp) -> Result<S> {
    Ok(match op {
        ArithOp::Add => a.clone() + b.clone(),
        ArithOp::Sub => a.clone() - b.clone(),
        ArithOp::Mul => a.clone() * b.clone(),
        ArithOp::Div => {
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            a.clone() / b.clone()
        }
    })
}

/// Parses `"p/q"`, plain integers and finite decimals such as `"-1.25"`.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let fail = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(|| fail("bad numerator"))?;
        let den = parse_int(den.trim()).ok_or_else(|| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(fail("no digits"));
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit())
        {
            return Err(fail("bad decimal digits"));
        }
        let digits = format!("{whole}{frac}");
        let mantissa = BigInt::from_str(&digits).map_err(|_| fail("bad decimal digits"))?;
        let scale = num_traits::pow(BigInt::from(10u8), frac.len());
        let value = BigRational::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_int(s)
        .map(BigRational::from_integer)
        .ok_or_else(|| fail("not an integer, fraction or decimal"))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Canonical `"p/q"` text, `"p"` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// Decimal rendering rounded half away from zero to `digits` fractional digits.
///
/// Annotation only: nothing in the crate compares these strings.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u8), digits);
    let scaled = r.numer().abs() * &scale;
    let (q, rem) = scaled.div_rem(r.denom());
    let rounded = if rem * 2u8 >= *r.denom() { q + 1u8 } else { q };
    let mut body = rounded.to_str_radix(10);
    if digits > 0 {
        if body.len() <= digits {
            body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
        }
        body.insert(body.len() - digits, '.');
    }
    let negative = r.numer().sign() == Sign::Minus && body.chars().any(|c| c != '0' && c != '.');
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// `2^k` as an exact rational.
pub(crate) fn two_pow(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k as usize)
}
