//! Scalar backends for integer-indexed sequences.
//!
//! Two backends are supported: `f64` for fast approximate work, and
//! `BigRational` for exact arithmetic.  Every finite `f64` is a dyadic
//! rational, so lifting float data into the exact backend is lossless.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Arithmetic required of a sequence entry.
///
/// `abs` and ordering are enough for positivity checks and total-variation
/// distances; anything needing square roots goes through `to_f64`.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// True for backends where comparisons are exact (no tolerance needed).
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact embedding of a float (dyadic rational); fails on non-finite input.
    fn from_f64(x: f64) -> Option<Self>;
    fn from_i64(n: i64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(x: f64) -> Option<Self> {
        Rat::from_float(x)
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
    }
}

/// Parse a scalar from its JSON form: a plain number, or a `"p/q"` string
/// for exact rationals.
pub fn parse_scalar<T: Scalar>(v: &serde_json::Value) -> Option<T> {
    match v {
        serde_json::Value::Number(n) => T::from_f64(n.as_f64()?),
        serde_json::Value::String(s) => {
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p, q),
                None => (s.as_str(), "1"),
            };
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(T::from_i64(p) / T::from_i64(q))
        }
        _ => None,
    }
}

/// Render a scalar into its JSON form; rationals become `"p/q"` strings.
pub fn scalar_to_json(x: &Rat) -> serde_json::Value {
    serde_json::Value::String(format!("{}/{}", x.numer(), x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roundtrips_exactly_through_rational() {
        let x = 0.1_f64;
        let r = <Rat as Scalar>::from_f64(x).unwrap();
        assert_eq!(Scalar::to_f64(&r), x);
        // 0.1 is not 1/10 in binary; the embedding is of the float, not the decimal.
        assert_ne!(r, Rat::new(BigInt::from(1), BigInt::from(10)));
    }

    #[test]
    fn parse_rational_strings() {
        let r: Rat = parse_scalar(&serde_json::json!("3/8")).unwrap();
        assert_eq!(r, Rat::new(BigInt::from(3), BigInt::from(8)));
        let f: f64 = parse_scalar(&serde_json::json!(0.25)).unwrap();
        assert_eq!(f, 0.25);
    }
}
