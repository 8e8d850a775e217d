//! Scalar types shared by every instance: exact rationals or IEEE doubles.
//!
//! An instance is built over exactly one scalar type, so mixing modes is a
//! type error everywhere except at the file boundary, where [`NumericMode`]
//! is checked explicitly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational used by the exact mode.
pub type Rational = BigRational;

/// Factors below this threshold switch float products to log space.
const LOG_SPACE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Rational,
    Float,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericMode::Rational => f.write_str("rational"),
            NumericMode::Float => f.write_str("float"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiteralError {
    #[error("malformed rational literal {0:?} (expected \"p/q\" with integer p and q > 0)")]
    MalformedRational(String),
    #[error("rational literal {0:?} is not allowed in float mode")]
    RationalInFloatMode(String),
    #[error("non-integral number {0} is not allowed in rational mode (use a \"p/q\" string)")]
    FloatInRationalMode(String),
    #[error("expected a number or a \"p/q\" string, found {0}")]
    WrongType(String),
    #[error("number {0} is not finite")]
    NotFinite(String),
}

/// Numeric operations needed by the risk engines and solvers.
pub trait Scalar: Num + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const MODE: NumericMode;

    fn from_u64(n: u64) -> Self;

    /// `p / q`; `q` must be non-zero.
    fn from_ratio(p: i64, q: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact conversion to a non-negative integer, if the value is one.
    fn to_u64_exact(&self) -> Option<u64>;

    /// Product of the given factors. Float mode accumulates in log space when
    /// any factor is tiny so long products of near-zero terms do not flush
    /// to zero early.
    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self;

    fn sum<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |acc, t| acc + t)
    }

    fn parse_json(value: &serde_json::Value) -> Result<Self, LiteralError>;

    fn to_json(&self) -> serde_json::Value;

    fn is_probability(&self) -> bool {
        *self >= Self::zero() && *self <= Self::one()
    }
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_u64_exact(&self) -> Option<u64> {
        if self.is_finite() && *self >= 0.0 && self.fract() == 0.0 && *self <= u64::MAX as f64 {
            Some(*self as u64)
        } else {
            None
        }
    }

    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        let factors: Vec<f64> = factors.into_iter().collect();
        if factors.contains(&0.0) {
            return 0.0;
        }
        if factors.iter().any(|&f| f.abs() < LOG_SPACE_THRESHOLD) {
            let negative = factors.iter().filter(|f| **f < 0.0).count() % 2 == 1;
            let log_sum: f64 = factors.iter().map(|f| f.abs().ln()).sum();
            let magnitude = log_sum.exp();
            if negative {
                -magnitude
            } else {
                magnitude
            }
        } else {
            factors.iter().product()
        }
    }

    fn parse_json(value: &serde_json::Value) -> Result<Self, LiteralError> {
        match value {
            serde_json::Value::Number(n) => {
                let x = n.as_f64().ok_or_else(|| LiteralError::NotFinite(n.to_string()))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(LiteralError::NotFinite(n.to_string()))
                }
            }
            serde_json::Value::String(s) => Err(LiteralError::RationalInFloatMode(s.clone())),
            other => Err(LiteralError::WrongType(other.to_string())),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for Rational {
    const MODE: NumericMode = NumericMode::Rational;

    fn from_u64(n: u64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_u64_exact(&self) -> Option<u64> {
        if self.is_integer() && !self.is_negative() {
            self.to_integer().to_u64()
        } else {
            None
        }
    }

    fn product<I: IntoIterator<Item = Self>>(factors: I) -> Self {
        let mut acc = Rational::one();
        for f in factors {
            if f.is_zero() {
                return Rational::zero();
            }
            if !f.is_one() {
                acc *= f;
            }
        }
        acc
    }

    fn parse_json(value: &serde_json::Value) -> Result<Self, LiteralError> {
        match value {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(Rational::from_integer(BigInt::from(u)))
                } else {
                    Err(LiteralError::FloatInRationalMode(n.to_string()))
                }
            }
            serde_json::Value::String(s) => parse_rational(s),
            other => Err(LiteralError::WrongType(other.to_string())),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        if self.is_integer() {
            if let Some(i) = self.to_integer().to_i64() {
                return serde_json::Value::from(i);
            }
        }
        serde_json::Value::String(format_rational(self))
    }
}

/// Parses `"p/q"` (or a bare integer string) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    let bad = || LiteralError::MalformedRational(text.to_string());
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let p = BigInt::from_str(p).map_err(|_| bad())?;
    let q = BigInt::from_str(q).map_err(|_| bad())?;
    if !q.is_positive() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Formats as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
