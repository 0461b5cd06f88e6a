//! Exact extended values.
//!
//! [`ExtValue`] is the cost type of the whole crate: a nonnegative rational
//! or `+inf`. [`Extended`] drops the sign restriction and is used where
//! negative numbers legitimately appear (signed quadratic test functions and
//! explicit value tables handed to the oracles).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// A nonnegative rational extended with `+inf`.
///
/// Finite values are kept in lowest terms (the invariant of
/// [`BigRational`]), so derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtValue(Option<BigRational>);

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue(Some(BigRational::zero()))
    }

    pub fn infinity() -> Self {
        ExtValue(None)
    }

    pub fn from_integer(v: u64) -> Self {
        ExtValue(Some(BigRational::from_integer(BigInt::from(v))))
    }

    /// `num / den`, rejecting negative values and zero denominators.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, Error> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Validation("zero denominator".into()));
        }
        Self::from_rational(BigRational::new(num.into(), den))
    }

    pub fn from_rational(r: BigRational) -> Result<Self, Error> {
        if r.is_negative() {
            return Err(Error::Validation(format!("negative value {r}")));
        }
        Ok(ExtValue(Some(r)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_some()
    }

    pub fn is_infinite(&self) -> bool {
        self.0.is_none()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Some(r) if r.is_zero())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        self.0.as_ref()
    }

    /// Multiplication by a 0/1 weight, with `0 * inf = 0`.
    pub fn weighted(&self, w: bool) -> Self {
        if w {
            self.clone()
        } else {
            Self::zero()
        }
    }

    pub fn to_extended(&self) -> Extended {
        match &self.0 {
            Some(r) => Extended::Finite(r.clone()),
            None => Extended::Infinity,
        }
    }
}

impl Default for ExtValue {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &ExtValue) -> ExtValue {
        match (&self.0, &rhs.0) {
            (Some(a), Some(b)) => ExtValue(Some(a + b)),
            _ => ExtValue(None),
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self.0, rhs.0) {
            (Some(a), Some(b)) => ExtValue(Some(a + b)),
            _ => ExtValue(None),
        }
    }
}

impl<'a> Sum<&'a ExtValue> for ExtValue {
    fn sum<I: Iterator<Item = &'a ExtValue>>(iter: I) -> Self {
        let mut acc = BigRational::zero();
        for v in iter {
            match &v.0 {
                Some(r) => acc += r,
                None => return ExtValue::infinity(),
            }
        }
        ExtValue(Some(acc))
    }
}

impl Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> Self {
        let mut acc = BigRational::zero();
        for v in iter {
            match v.0 {
                Some(r) => acc += r,
                None => return ExtValue::infinity(),
            }
        }
        ExtValue(Some(acc))
    }
}

impl From<u64> for ExtValue {
    fn from(v: u64) -> Self {
        Self::from_integer(v)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Some(r) => fmt_rational(r, f),
            None => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `"inf"`, an integer `"n"`, or a ratio `"p/q"`.
impl FromStr for ExtValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().parse::<Extended>()? {
            Extended::Infinity => Ok(Self::infinity()),
            Extended::Finite(r) => Self::from_rational(r),
        }
    }
}

/// A signed rational extended with `+inf`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(BigRational),
    Infinity,
}

impl Extended {
    pub fn zero() -> Self {
        Extended::Finite(BigRational::zero())
    }

    pub fn from_integer(v: i64) -> Self {
        Extended::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Extended::Finite(r) if r.is_negative())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            Extended::Finite(r) => Some(r),
            Extended::Infinity => None,
        }
    }

    /// Back to [`ExtValue`] when the value is nonnegative.
    pub fn to_ext_value(&self) -> Option<ExtValue> {
        match self {
            Extended::Infinity => Some(ExtValue::infinity()),
            Extended::Finite(r) => ExtValue::from_rational(r.clone()).ok(),
        }
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Extended {
    type Output = Extended;

    fn add(self, rhs: &Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        &self + &rhs
    }
}

impl From<&ExtValue> for Extended {
    fn from(v: &ExtValue) -> Self {
        v.to_extended()
    }
}

impl From<ExtValue> for Extended {
    fn from(v: ExtValue) -> Self {
        v.to_extended()
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(r) => fmt_rational(r, f),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Extended {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Extended::Infinity);
        }
        let bad = || Error::Parse(format!("invalid value {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Extended::Finite(BigRational::new(num, den)))
    }
}
