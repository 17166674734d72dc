//! Scalar types used for thresholds, weights and ε.
//!
//! Every threshold inequality in the pipeline is written in terms of
//! [`Scalar`], so the same code runs in exact rational arithmetic
//! ([`Rational`], the default) or in floating point (`f64`, `f32`).
//! Floating point is accepted but boundary cases of the inclusive
//! inequalities can flip under rounding; the exact types never do.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};
use thiserror::Error;

/// Exact rational with 64-bit numerator and denominator.
pub type Rational = Ratio<i64>;

/// Exact rational with 128-bit numerator and denominator.
pub type WideRational = Ratio<i128>;

pub trait Scalar: Copy + Debug + PartialOrd + Num + Send + Sync + 'static {
    fn from_count(n: usize) -> Self;

    /// `numer / denom`; `denom` must be nonzero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(self) -> f64;

    /// `⌊self⌋` for non-negative values, 0 for negative ones.
    fn floor_count(self) -> usize;

    /// `⌈self⌉` for non-negative values, 0 for negative ones.
    fn ceil_count(self) -> usize;

    /// Lossless text form: `p/q` for rationals, shortest decimal for floats.
    fn to_text(self) -> String;

    fn from_rational(r: Rational) -> Self {
        Self::from_ratio(*r.numer(), *r.denom())
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn from_count(n: usize) -> Self {
                n as $t
            }
            #[inline]
            fn from_ratio(numer: i64, denom: i64) -> Self {
                (numer as f64 / denom as f64) as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn floor_count(self) -> usize {
                if self <= 0.0 { 0 } else { self.floor() as usize }
            }
            #[inline]
            fn ceil_count(self) -> usize {
                if self <= 0.0 { 0 } else { self.ceil() as usize }
            }
            fn to_text(self) -> String {
                format!("{self}")
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

macro_rules! impl_ratio_scalar {
    ($($int:ty),*) => {$(
        impl Scalar for Ratio<$int> {
            #[inline]
            fn from_count(n: usize) -> Self {
                Ratio::from_integer(n as $int)
            }
            #[inline]
            fn from_ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(numer as $int, denom as $int)
            }
            fn to_f64(self) -> f64 {
                self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
            }
            fn floor_count(self) -> usize {
                if *self.numer() <= 0 {
                    0
                } else {
                    Integer::div_floor(self.numer(), self.denom()) as usize
                }
            }
            fn ceil_count(self) -> usize {
                if *self.numer() <= 0 {
                    0
                } else {
                    Integer::div_ceil(self.numer(), self.denom()) as usize
                }
            }
            fn to_text(self) -> String {
                if *self.denom() == 1 {
                    self.numer().to_string()
                } else {
                    format!("{}/{}", self.numer(), self.denom())
                }
            }
        }
    )*};
}

impl_ratio_scalar!(i64, i128);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("rational literal `{0}` does not fit in 64-bit arithmetic")]
    Overflow(String),
}

/// Parses `p/q`, an integer, or a plain decimal such as `0.005` into an
/// exact [`Rational`].
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n = i64::from_str(n.trim()).map_err(|_| malformed())?;
        let d = i64::from_str(d.trim()).map_err(|_| malformed())?;
        if d == 0 {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Ratio::new(n, d));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(malformed());
    }
    let frac_trimmed = frac_part.trim_end_matches('0');
    let overflow = || ParseRationalError::Overflow(s.to_string());
    let denom = 10i64
        .checked_pow(frac_trimmed.len() as u32)
        .ok_or_else(overflow)?;
    let digits = format!("{int_part}{frac_trimmed}");
    let numer = if digits.is_empty() {
        0
    } else {
        i64::from_str(&digits).map_err(|_| overflow())?
    };
    let r = Ratio::new(numer, denom);
    Ok(if negative { -r } else { r })
}

/// Converts a float to a rational, exactly when its shortest decimal form
/// fits, otherwise by continued-fraction approximation.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse_rational(&format!("{x}"))
        .ok()
        .or_else(|| Ratio::approximate_float(x))
}

/// `p/q` display, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter writing a [`Rational`] as the string `"p/q"` and reading
/// either that string, a decimal string, or a JSON number.
pub mod serde_rational {
    use super::*;
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        struct RationalVisitor;

        impl<'de> Visitor<'de> for RationalVisitor {
            type Value = Rational;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a rational as \"p/q\", a decimal string, or a number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                parse_rational(v).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
                rational_from_f64(v).ok_or_else(|| E::custom(format!("cannot represent {v}")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Ratio::from_integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                i64::try_from(v)
                    .map(Ratio::from_integer)
                    .map_err(|_| E::custom("integer out of range"))
            }
        }

        d.deserialize_any(RationalVisitor)
    }
}

/// Helper for messages: renders any scalar through `f64`.
pub(crate) struct Approx<T>(pub T);

impl<T: Scalar> Display for Approx<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0.to_f64())
    }
}
