//! Exact rational constants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// An arbitrary-precision rational number, always stored in lowest terms
/// with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rational(BigRational);

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid digits in rational literal `{0}`")]
    InvalidDigits(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    /// Builds `numer / denom`, returning `None` when `denom` is zero.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Option<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(Pow::pow(&self.0, exp))
    }

    /// Division, `None` on a zero divisor.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Accepts `n`, `-n`, `n/d` and `-n/d` with decimal digits.
impl FromStr for Rational {
    type Err = RationalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(RationalParseError::Empty);
        }
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (body, None),
        };
        let digits = |part: &str| -> Result<BigInt, RationalParseError> {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(RationalParseError::InvalidDigits(s.to_string()));
            }
            part.parse::<BigInt>()
                .map_err(|_| RationalParseError::InvalidDigits(s.to_string()))
        };
        let mut numer = digits(num)?;
        if negative {
            numer = -numer;
        }
        let denom = match den {
            Some(d) => digits(d)?,
            None => BigInt::one(),
        };
        Rational::new(numer, denom).ok_or_else(|| RationalParseError::ZeroDenominator(s.to_string()))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn stored_reduced() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("2/4").to_string(), "1/2");
        assert_eq!(q("4/2").to_string(), "2");
        assert_eq!(q("-6/8").to_string(), "-3/4");
        assert_eq!(Rational::new(3, -6).unwrap().to_string(), "-1/2");
    }

    #[test]
    fn ratplus_example() {
        assert_eq!((q("2/5") + q("3/8")).to_string(), "31/40");
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!("".parse::<Rational>(), Err(RationalParseError::Empty));
        assert!(matches!("1/0".parse::<Rational>(), Err(RationalParseError::ZeroDenominator(_))));
        assert!(matches!("1/".parse::<Rational>(), Err(RationalParseError::InvalidDigits(_))));
        assert!(matches!("--1".parse::<Rational>(), Err(RationalParseError::InvalidDigits(_))));
        assert!(matches!("+1".parse::<Rational>(), Err(RationalParseError::InvalidDigits(_))));
    }

    #[test]
    fn pow_and_div() {
        assert_eq!(q("-2/3").pow(3), q("-8/27"));
        assert_eq!(q("5").pow(0), Rational::one());
        assert_eq!(q("1/2").checked_div(&q("1/4")), Some(q("2")));
        assert_eq!(q("1").checked_div(&Rational::zero()), None);
    }
}
