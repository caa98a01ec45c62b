//! Sequences indexed by integers with finite support.
//!
//! An `IntSeq` stores contiguous values starting at `offset`; index `n`
//! outside the stored range reads as zero.  Convolution is the group
//! algebra product over ℤ.  The reciprocal of a sequence with nonzero
//! leading entry inverts it under convolution: `(recip(q) * q)(n) = δ₀ₙ`.
//! Entry `j` of the reciprocal depends only on the leading `j + 1` entries
//! of the input, so truncating a sequence cannot change the reciprocal
//! entries that remain computable.

use crate::scalar::{parse_scalar, scalar_to_json, Rat, Scalar};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SeqError {
    #[error("reciprocal needs a nonzero leading entry")]
    ZeroLeadingEntry,
    #[error("leading entry magnitude {0} is below the zero tolerance; trim the sequence first")]
    IllConditionedLeadingEntry(f64),
    #[error("operation needs a nonempty sequence")]
    Empty,
    #[error("bad sequence JSON: {0}")]
    BadJson(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntSeq<T: Scalar> {
    offset: i64,
    values: Vec<T>,
}

impl<T: Scalar> IntSeq<T> {
    /// Builds a sequence from `offset` and raw values, trimming exact zeros
    /// at both ends so the leading stored entry is nonzero.
    pub fn new(offset: i64, values: Vec<T>) -> Self {
        let mut s = IntSeq { offset, values };
        s.canonicalize();
        s
    }

    pub fn zero() -> Self {
        IntSeq {
            offset: 0,
            values: Vec::new(),
        }
    }

    pub fn delta(n: i64) -> Self {
        IntSeq {
            offset: n,
            values: vec![T::one()],
        }
    }

    fn canonicalize(&mut self) {
        while self.values.first().is_some_and(|v| v.is_zero()) {
            self.values.remove(0);
            self.offset += 1;
        }
        while self.values.last().is_some_and(|v| v.is_zero()) {
            self.values.pop();
        }
        if self.values.is_empty() {
            self.offset = 0;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lowest index with a stored value (n⋆).
    pub fn min_index(&self) -> i64 {
        self.offset
    }

    /// Highest index with a stored value.
    pub fn max_index(&self) -> i64 {
        self.offset + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Entry at index `n`; zero outside the stored range.
    pub fn get(&self, n: i64) -> T {
        if n < self.offset {
            return T::zero();
        }
        match usize::try_from(n - self.offset) {
            Ok(i) if i < self.values.len() => self.values[i].clone(),
            _ => T::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.offset + i as i64, v))
    }

    /// Translation: `shift(q, s)(n) = q(n - s)`.
    pub fn shift(&self, s: i64) -> Self {
        if self.is_empty() {
            return Self::zero();
        }
        IntSeq {
            offset: self.offset + s,
            values: self.values.clone(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(
            self.offset,
            self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        )
    }

    pub fn sum(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |a, v| a + v.clone())
    }

    /// Rescales to unit sum.  No-op on the zero sequence.
    pub fn normalized(&self) -> Self {
        let s = self.sum();
        if s.is_zero() {
            return self.clone();
        }
        Self::new(
            self.offset,
            self.values.iter().map(|v| v.clone() / s.clone()).collect(),
        )
    }

    pub fn mean(&self) -> f64 {
        let mut m = 0.0;
        for (n, v) in self.iter() {
            m += n as f64 * v.to_f64();
        }
        m / self.sum().to_f64()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let mut v2 = 0.0;
        for (n, v) in self.iter() {
            v2 += (n as f64 - mu).powi(2) * v.to_f64();
        }
        v2 / self.sum().to_f64()
    }

    pub fn min_entry(&self) -> T {
        self.values
            .iter()
            .cloned()
            .fold(T::zero(), |a, v| if v < a { v } else { a })
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Self {
        Self::new(self.offset, self.values.iter().map(|v| v.abs()).collect())
    }

    /// Drops entries whose magnitude is at most `floor` from both ends
    /// (interior entries are kept so the support stays contiguous).
    pub fn trim(&self, floor: f64) -> Self {
        let mut lo = 0usize;
        let mut hi = self.values.len();
        while lo < hi && self.values[lo].to_f64().abs() <= floor {
            lo += 1;
        }
        while hi > lo && self.values[hi - 1].to_f64().abs() <= floor {
            hi -= 1;
        }
        IntSeq::new(self.offset + lo as i64, self.values[lo..hi].to_vec())
    }

    /// Full convolution: `(p * q)(n) = Σₖ p(k) q(n - k)`.
    pub fn convolve(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::zero();
        }
        let n = self.values.len() + other.values.len() - 1;
        let mut out = vec![T::zero(); n];
        for (i, a) in self.values.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.values.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(self.offset + other.offset, out)
    }

    /// Partial convolution restricted to indices of the first factor:
    /// `(p *ₐᵇ q)(n) = Σ_{k=a}^{b} p(k) q(n - k)`.
    pub fn partial_convolve(&self, other: &Self, a: i64, b: i64) -> Self {
        let lo = a.max(self.min_index());
        let hi = b.min(self.max_index());
        if lo > hi || other.is_empty() {
            return Self::zero();
        }
        let window = IntSeq::new(
            lo,
            self.values[(lo - self.offset) as usize..=(hi - self.offset) as usize].to_vec(),
        );
        window.convolve(other)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let lo = self.min_index().min(other.min_index());
        let hi = self.max_index().max(other.max_index());
        let vals = (lo..=hi).map(|n| self.get(n) + other.get(n)).collect();
        Self::new(lo, vals)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-T::one())))
    }

    /// Reciprocal under convolution, truncated to `horizon` entries.
    ///
    /// The result has leading index `-n⋆` and satisfies
    /// `(recip * q)(n) = δ₀ₙ` for `0 ≤ n < horizon` (exactly on the
    /// rational backend).  Scale covariance holds by construction:
    /// `recip(c·q) = (1/c)·recip(q)`.
    pub fn reciprocal(&self, horizon: usize) -> Result<Self, SeqError> {
        let lead = self.values.first().ok_or(SeqError::ZeroLeadingEntry)?;
        if lead.is_zero() {
            return Err(SeqError::ZeroLeadingEntry);
        }
        let inv_lead = T::one() / lead.clone();
        let mut r: Vec<T> = Vec::with_capacity(horizon);
        r.push(inv_lead.clone());
        for j in 1..horizon {
            // (recip * q)(j) = 0  =>  solve for r[j].
            let mut acc = T::zero();
            for (m, rm) in r.iter().enumerate() {
                let qi = j - m; // index into self.values: q(n⋆ + qi)
                if qi < self.values.len() {
                    acc = acc + rm.clone() * self.values[qi].clone();
                }
            }
            r.push(-acc * inv_lead.clone());
        }
        Ok(IntSeq::new(-self.offset, r))
    }

    /// Total-variation distance `½ Σ |p(n) - q(n)|` as a float.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        self.sub(other).abs().sum().to_f64() / 2.0
    }

    /// Bhattacharyya coefficient `Σ √(p(n) q(n))` over the common support.
    /// Negative entries contribute nothing.
    pub fn bhattacharyya(&self, other: &Self) -> f64 {
        let mut bc = 0.0;
        for (n, v) in self.iter() {
            let a = v.to_f64();
            let b = other.get(n).to_f64();
            if a > 0.0 && b > 0.0 {
                bc += (a * b).sqrt();
            }
        }
        bc
    }

    pub fn to_f64_seq(&self) -> IntSeq<f64> {
        IntSeq {
            offset: self.offset,
            values: self.values.iter().map(|v| v.to_f64()).collect(),
        }
    }

    pub fn to_json(&self) -> Value
    where
        T: JsonScalar,
    {
        serde_json::json!({
            "offset": self.offset,
            "values": self.values.iter().map(JsonScalar::to_json_value).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SeqError> {
        let offset = v
            .get("offset")
            .and_then(Value::as_i64)
            .ok_or_else(|| SeqError::BadJson("missing integer \"offset\"".into()))?;
        let vals = v
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| SeqError::BadJson("missing array \"values\"".into()))?;
        let values = vals
            .iter()
            .map(|x| {
                parse_scalar::<T>(x)
                    .ok_or_else(|| SeqError::BadJson(format!("bad entry {x}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntSeq::new(offset, values))
    }
}

/// Scalars that know their own JSON rendering.
pub trait JsonScalar: Scalar {
    fn to_json_value(&self) -> Value;
}

impl JsonScalar for f64 {
    fn to_json_value(&self) -> Value {
        serde_json::json!(self)
    }
}

impl JsonScalar for Rat {
    fn to_json_value(&self) -> Value {
        scalar_to_json(self)
    }
}

impl IntSeq<f64> {
    /// Exact lift into the rational backend (floats are dyadic rationals).
    pub fn to_rational(&self) -> IntSeq<Rat> {
        IntSeq {
            offset: self.offset,
            values: self
                .values
                .iter()
                .map(|v| Rat::from_float(*v).expect("finite entry"))
                .collect(),
        }
    }
}
