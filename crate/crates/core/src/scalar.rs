//! Exact rational scalars.
//!
//! Every distance, bound and parameter in the lab is a [`Scalar`]. Values
//! whose reduced numerator and denominator fit in an `i64` are kept inline and
//! combined through `i128` intermediates; anything larger is promoted to a
//! heap-backed [`BigRational`]. The representation is canonical: a value that
//! fits inline is never stored as big, so derived equality and hashing agree
//! with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug)]
enum Repr {
    /// Reduced, denominator > 0.
    Small(i64, i64),
    /// Reduced, does not fit `Small`.
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone, Debug)]
pub struct Scalar(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Small(n, 1))
    }

    /// Builds `num/den` in lowest terms.
    pub fn new(num: i64, den: i64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    /// `1/n`, the workhorse of the reciprocal catalog spaces.
    pub fn recip_int(n: i64) -> Self {
        Self::from_i128(1, n as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs());
        // g >= 1 because den != 0; g divides both so the quotients fit.
        let (mut n, mut d) = if g == 1 {
            (num, den)
        } else {
            let g = g as i128;
            // i128::MIN / -1 cannot happen: g is positive.
            (num / g, den / g)
        };
        if d < 0 {
            match (n.checked_neg(), d.checked_neg()) {
                (Some(nn), Some(dd)) => {
                    n = nn;
                    d = dd;
                }
                _ => {
                    return Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
                }
            }
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Scalar(Repr::Small(n, d)),
            _ => Scalar(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new reduces and normalizes the sign; we only demote.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Scalar(Repr::Small(n, d)),
            _ => Scalar(Repr::Big(r)),
        }
    }

    /// Exact value as a `BigRational`.
    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small(n, _) => n.cmp(&0),
            Repr::Big(r) => {
                if r.is_negative() {
                    Ordering::Less
                } else if r.is_zero() {
                    Ordering::Equal
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn half(&self) -> Scalar {
        match self.0 {
            Repr::Small(n, d) => Self::from_i128(n as i128, 2 * d as i128),
            Repr::Big(ref r) => Self::from_big(r / BigInt::from(2)),
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    /// Exact quotient; `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Self::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Self::from_big(self.to_big() / rhs.to_big()),
        })
    }

    pub fn recip(&self) -> Option<Scalar> {
        Scalar::one().checked_div(self)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        match self.0 {
            Repr::Small(n, d) => BigInt::from(Integer::div_floor(&n, &d)),
            Repr::Big(ref r) => r.floor().to_integer(),
        }
    }

    /// Approximate value for rendering only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Power of two `2^e` for any integer exponent.
    pub fn pow2(e: i32) -> Scalar {
        let p = BigInt::one() << e.unsigned_abs();
        if e >= 0 {
            Self::from_big(BigRational::from_integer(p))
        } else {
            Self::from_big(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Exact trichotomy of two scalars.
pub fn compare(a: &Scalar, b: &Scalar) -> Ordering {
    a.cmp(b)
}

/// Decides `a < sqrt(u)` without taking a square root.
///
/// Negative `a` is below every root; otherwise both sides are non-negative and
/// the comparison is equivalent to `a^2 < u`.
pub fn lt_sqrt(a: &Scalar, u: &Scalar) -> Result<bool, Error> {
    if u.is_negative() {
        return Err(Error::NegativeRadicand(u.clone()));
    }
    if a.is_negative() {
        return Ok(true);
    }
    Ok(a.square() < *u)
}

/// Decides `a <= sqrt(u)`; same sign analysis as [`lt_sqrt`].
pub fn le_sqrt(a: &Scalar, u: &Scalar) -> Result<bool, Error> {
    if u.is_negative() {
        return Err(Error::NegativeRadicand(u.clone()));
    }
    if a.is_negative() {
        return Ok(true);
    }
    Ok(a.square() <= *u)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            // canonical form: a small value never equals a big one
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Scalar::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Scalar::from_i128(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Scalar::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Scalar::from_i128(*a as i128 - *c as i128, *b as i128)
                } else {
                    Scalar::from_i128(
                        *a as i128 * *d as i128 - *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Scalar::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Scalar::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Scalar::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] when the
    /// divisor is not known to be nonzero.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Scalar(Repr::Small(m, d)),
                None => Scalar::from_big(-self.to_big()),
            },
            Repr::Big(ref r) => Scalar::from_big(-r),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_big(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

fn parse_int(s: &str, full: &str) -> Result<BigInt, Error> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid scalar {full:?}")));
    }
    s.parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("invalid scalar {full:?}")))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p/q`, `p`, and finite decimals such as `-0.125`.
    fn from_str(text: &str) -> Result<Self, Error> {
        let s = text.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num = parse_int(p.trim(), text)?;
            let den = parse_int(q.trim(), text)?;
            if q.trim().starts_with(['+', '-']) {
                return Err(Error::Parse(format!("sign belongs on the numerator: {text:?}")));
            }
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(Scalar::from_big(BigRational::new(num, den)));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(format!("invalid scalar {text:?}")));
            }
            let negative = whole.starts_with('-');
            let whole_digits = whole.strip_prefix(['+', '-']).unwrap_or(whole);
            let whole_int = if whole_digits.is_empty() {
                BigInt::zero()
            } else {
                parse_int(whole_digits, text)?
            };
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac_int: BigInt = frac.parse().map_err(|_| Error::Parse(text.to_string()))?;
            let mut num = whole_int * &scale + frac_int;
            if negative {
                num = -num;
            }
            return Ok(Scalar::from_big(BigRational::new(num, scale)));
        }
        Ok(Scalar::from_big(BigRational::from_integer(parse_int(s, text)?)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::from_int(n)),
        }
    }
}

/// Shorthand for literal rationals in tests and catalogs. Panics on a zero
/// denominator.
pub fn q(num: i64, den: i64) -> Scalar {
    Scalar::new(num, den).expect("nonzero denominator")
}
