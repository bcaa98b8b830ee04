//! Exact rational coordinates.
//!
//! All derived quantities (cut points, trapezoid bounds, weights) are
//! rationals over arbitrary-precision integers. `num_rational::BigRational`
//! already maintains the canonical form we rely on: reduced to lowest terms
//! with a positive denominator, so equality and ordering are exact.

use alloc::string::String;
use alloc::string::ToString;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Coord = BigRational;

/// Rational from an integer.
pub fn crd(v: i64) -> Coord {
    BigRational::from_integer(BigInt::from(v))
}

/// Rational `n / d`. `d` must be nonzero.
pub fn frac(n: i64, d: i64) -> Coord {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(c: &Coord) -> bool {
    c.is_zero()
}

pub fn sign(c: &Coord) -> i8 {
    if c.is_zero() {
        0
    } else if c.is_positive() {
        1
    } else {
        -1
    }
}

/// `|x|` for rationals.
pub fn rabs(c: &Coord) -> Coord {
    c.abs()
}

pub fn half(c: &Coord) -> Coord {
    c / BigRational::from_integer(BigInt::from(2))
}

pub fn two() -> Coord {
    BigRational::from_integer(BigInt::from(2))
}

pub fn one() -> Coord {
    BigRational::one()
}

pub fn zero() -> Coord {
    BigRational::zero()
}

/// Extracts the coordinate as an `i64` if it is an integer that fits the
/// fast-path budget (|v| < 2^60, so cross products of differences fit i128).
pub fn to_fast_i64(c: &Coord) -> Option<i64> {
    if !c.denom().is_one() {
        return None;
    }
    let v = c.numer().to_i64()?;
    const LIMIT: i64 = 1 << 60;
    if v > -LIMIT && v < LIMIT {
        Some(v)
    } else {
        None
    }
}

/// Serializes a rational as `"num"` or `"num/den"`.
pub fn coord_to_string(c: &Coord) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        let mut s = c.numer().to_string();
        s.push('/');
        s.push_str(&c.denom().to_string());
        s
    }
}

/// Parses `"num"` or `"num/den"` back into a rational.
pub fn coord_from_str(s: &str) -> Option<Coord> {
    let mut parts = s.splitn(2, '/');
    let num: BigInt = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(BigRational::from_integer(num)),
        Some(d) => {
            let den: BigInt = d.trim().parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(BigRational::new(num, den))
            }
        }
    }
}
