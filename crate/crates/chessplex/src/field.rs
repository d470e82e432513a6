//! Coefficient fields for chain-complex linear algebra: prime fields with a
//! runtime modulus and exact rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("unknown coefficient field `{0}` (expected `Q` or `F<p>` with p prime)")]
    UnknownField(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Arithmetic context of a coefficient field. Elements are plain values; the
/// context carries the modulus where one is needed.
pub trait FieldOps {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b))
    }
}

/// The prime field `F_p` with elements reduced to `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl FieldOps for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        // Extended Euclid on (a, p).
        let (mut t, mut new_t): (i128, i128) = (0, 1);
        let (mut r, mut new_r): (i128, i128) = (self.p as i128, *a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        debug_assert_eq!(r, 1);
        t.rem_euclid(self.p as i128) as u64
    }

    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }
}

/// The rationals with exact `BigRational` arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rationals;

impl FieldOps for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }

    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A named coefficient field: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoefficientField {
    Rational,
    Prime(u64),
}

impl CoefficientField {
    /// The default battery: Q, F_2, F_3, F_5.
    pub fn default_battery() -> Vec<CoefficientField> {
        vec![
            CoefficientField::Rational,
            CoefficientField::Prime(2),
            CoefficientField::Prime(3),
            CoefficientField::Prime(5),
        ]
    }
}

impl fmt::Display for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientField::Rational => write!(f, "Q"),
            CoefficientField::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for CoefficientField {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, FieldError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(CoefficientField::Rational);
        }
        if let Some(rest) = s.strip_prefix('F').or_else(|| s.strip_prefix('f')) {
            if let Ok(p) = rest.parse::<u64>() {
                PrimeField::new(p)?;
                return Ok(CoefficientField::Prime(p));
            }
        }
        Err(FieldError::UnknownField(s.to_string()))
    }
}

/// Parses rational numbers written as `p/q` or as a plain integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).ok()?;
            let den = BigInt::from_str(den.trim()).ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(num, den))
        }
        None => Some(BigRational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

/// Formats a rational as `p/q` (or plain `p` when the denominator is 1).
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else if x.denom().is_negative() {
        format_rational(&BigRational::new(-x.numer().clone(), -x.denom().clone()))
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(f5.add(&3, &4), 2);
        assert_eq!(f5.mul(&3, &4), 2);
        assert_eq!(f5.inv(&3), 2);
        assert_eq!(f5.from_i64(-1), 4);
        for a in 1..5 {
            assert_eq!(f5.mul(&a, &f5.inv(&a)), 1);
        }
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(PrimeField::new(6).unwrap_err(), FieldError::NotPrime(6));
    }

    #[test]
    fn field_names_round_trip() {
        for name in ["Q", "F2", "F3", "F5", "F101"] {
            let f: CoefficientField = name.parse().unwrap();
            assert_eq!(f.to_string(), name);
        }
        assert!("F4".parse::<CoefficientField>().is_err());
        assert!("R".parse::<CoefficientField>().is_err());
    }

    #[test]
    fn rational_strings_round_trip() {
        for s in ["3/4", "-7/2", "5", "0"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(format_rational(&x), s);
        }
        assert!(parse_rational("1/0").is_none());
    }
}
