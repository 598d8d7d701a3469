//! Scalar abstraction shared by every space model.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`]) and
//! IEEE floats (`f32`, `f64`). Algorithms are written once against
//! [`Scalar`] and compare values through a [`Context`], whose tolerance is
//! zero in exact mode.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    Exact,
    Float,
}

/// Field-like number type used for distances, weights and pairings.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    const MODE: ArithmeticMode;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_i64(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    /// Lossy for rationals with huge terms; used only for reporting and sampling.
    fn to_f64(&self) -> f64;

    /// Converts a float. Exact mode keeps the binary value exactly.
    fn from_f64(value: f64) -> Option<Self>;

    /// Largest integer not exceeding `self`.
    fn floor_i64(&self) -> i64;

    fn is_finite(&self) -> bool;

    /// Tolerance used by [`Context::default`].
    fn default_tolerance() -> Self;

    /// Parses `"p/q"`, integers and decimals (with optional exponent).
    fn parse_scalar(text: &str) -> Result<Self>;

    /// `"p/q"` (or `"p"`) in exact mode, shortest round-trip decimal otherwise.
    fn render(&self) -> String;

    fn is_exact() -> bool {
        Self::MODE == ArithmeticMode::Exact
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

/// Scalars with a square root, needed by models whose distance is not
/// rational in the coordinates.
pub trait RealScalar: Scalar + num_traits::Float {}

impl RealScalar for f32 {}
impl RealScalar for f64 {}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const MODE: ArithmeticMode = ArithmeticMode::Float;

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(value: f64) -> Option<Self> {
                let v = value as $t;
                v.is_finite().then_some(v)
            }

            fn floor_i64(&self) -> i64 {
                num_traits::Float::floor(*self) as i64
            }

            fn is_finite(&self) -> bool {
                num_traits::Float::is_finite(*self)
            }

            fn default_tolerance() -> Self {
                $tol
            }

            fn parse_scalar(text: &str) -> Result<Self> {
                let text = text.trim();
                if let Some((n, d)) = text.split_once('/') {
                    let n: $t = n.trim().parse().map_err(|_| Error::parse_scalar(text))?;
                    let d: $t = d.trim().parse().map_err(|_| Error::parse_scalar(text))?;
                    if d == 0.0 {
                        return Err(Error::parse_scalar(text));
                    }
                    return Ok(n / d);
                }
                let v: $t = text.parse().map_err(|_| Error::parse_scalar(text))?;
                if num_traits::Float::is_finite(v) {
                    Ok(v)
                } else {
                    Err(Error::parse_scalar(text))
                }
            }

            fn render(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-4);

impl Scalar for Rational {
    const MODE: ArithmeticMode = ArithmeticMode::Exact;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(value: f64) -> Option<Self> {
        Rational::from_float(value)
    }

    fn floor_i64(&self) -> i64 {
        self.floor()
            .to_integer()
            .to_i64()
            .expect("floor out of i64 range")
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn default_tolerance() -> Self {
        Rational::zero()
    }

    fn parse_scalar(text: &str) -> Result<Self> {
        parse_exact(text.trim()).ok_or_else(|| Error::parse_scalar(text))
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

fn parse_exact(text: &str) -> Option<Rational> {
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    // decimal with optional exponent, e.g. "-1.25e-3"
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Some(if negative { -value } else { value })
}

/// Tolerance context for comparisons. Exact scalars use a zero tolerance,
/// which turns every comparison into an exact one.
#[derive(Debug, Clone, PartialEq)]
pub struct Context<S> {
    pub tol: S,
}

impl<S: Scalar> Default for Context<S> {
    fn default() -> Self {
        Self {
            tol: S::default_tolerance(),
        }
    }
}

impl<S: Scalar> Context<S> {
    pub fn with_tolerance(tol: S) -> Self {
        Self { tol }
    }

    pub fn is_zero(&self, value: &S) -> bool {
        value.abs() <= self.tol
    }

    pub fn approx_eq(&self, a: &S, b: &S) -> bool {
        self.is_zero(&(a.clone() - b.clone()))
    }

    /// `a <= b` up to tolerance.
    pub fn le(&self, a: &S, b: &S) -> bool {
        a.clone() <= b.clone() + self.tol.clone()
    }

    /// `a >= b` up to tolerance.
    pub fn ge(&self, a: &S, b: &S) -> bool {
        self.le(b, a)
    }
}

/// Positive integer `numer/denom` as a scalar, reduced. Handy in tests.
pub fn ratio<S: Scalar>(numer: i64, denom: i64) -> S {
    let g = numer.gcd(&denom).max(1);
    S::from_ratio(numer / g, denom / g)
}
