//! Exact scalars of the form `c * n^(e/2)` for a formal dimension
//! parameter `n`, with `c` rational and `e` an integer.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ScalarError;

/// A rational coefficient times a half-integer power of the dimension
/// parameter. Zero is always stored as `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfPowerScalar {
    coefficient: BigRational,
    half_exponent: i64,
}

impl HalfPowerScalar {
    pub fn new(coefficient: BigRational, half_exponent: i64) -> HalfPowerScalar {
        if coefficient.is_zero() {
            return HalfPowerScalar::zero();
        }
        HalfPowerScalar {
            coefficient,
            half_exponent,
        }
    }

    pub fn zero() -> HalfPowerScalar {
        HalfPowerScalar {
            coefficient: BigRational::zero(),
            half_exponent: 0,
        }
    }

    pub fn one() -> HalfPowerScalar {
        HalfPowerScalar {
            coefficient: BigRational::one(),
            half_exponent: 0,
        }
    }

    /// `n^(e/2)`.
    pub fn half_power(half_exponent: i64) -> HalfPowerScalar {
        HalfPowerScalar::new(BigRational::one(), half_exponent)
    }

    pub fn from_integer(value: i64) -> HalfPowerScalar {
        HalfPowerScalar::new(BigRational::from_integer(BigInt::from(value)), 0)
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn half_exponent(&self) -> i64 {
        self.half_exponent
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn mul(&self, other: &HalfPowerScalar) -> HalfPowerScalar {
        HalfPowerScalar::new(
            &self.coefficient * &other.coefficient,
            self.half_exponent + other.half_exponent,
        )
    }

    pub fn neg(&self) -> HalfPowerScalar {
        HalfPowerScalar::new(-self.coefficient.clone(), self.half_exponent)
    }

    /// Addition is only defined between like monomials (or with zero).
    pub fn checked_add(&self, other: &HalfPowerScalar) -> Result<HalfPowerScalar, ScalarError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.half_exponent != other.half_exponent {
            return Err(ScalarError::ExponentMismatch(
                self.half_exponent,
                other.half_exponent,
            ));
        }
        Ok(HalfPowerScalar::new(
            &self.coefficient + &other.coefficient,
            self.half_exponent,
        ))
    }

    /// Evaluates at a concrete dimension. A perfect square dimension
    /// always yields an exact rational; otherwise odd exponents leave a
    /// residual square-root factor.
    pub fn evaluate(&self, n: i64) -> Result<Evaluation, ScalarError> {
        if n < 1 {
            return Err(ScalarError::BadDimension(n));
        }
        if self.is_zero() {
            return Ok(Evaluation {
                rational: BigRational::zero(),
                carries_sqrt: false,
            });
        }
        let base = BigRational::from_integer(BigInt::from(n));
        if self.half_exponent % 2 == 0 {
            return Ok(Evaluation {
                rational: &self.coefficient * rational_power(&base, self.half_exponent / 2),
                carries_sqrt: false,
            });
        }
        let root = integer_sqrt(n);
        if root * root == n {
            // n^(e/2) = root^e exactly
            let root_rat = BigRational::from_integer(BigInt::from(root));
            return Ok(Evaluation {
                rational: &self.coefficient * rational_power(&root_rat, self.half_exponent),
                carries_sqrt: false,
            });
        }
        // n^(e/2) = n^((e-1)/2) * sqrt(n)
        let whole = (self.half_exponent - 1).div_euclid(2);
        Ok(Evaluation {
            rational: &self.coefficient * rational_power(&base, whole),
            carries_sqrt: true,
        })
    }
}

impl fmt::Display for HalfPowerScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.half_exponent == 0 {
            return write!(f, "{}", self.coefficient);
        }
        if !self.coefficient.is_one() {
            write!(f, "{}*", self.coefficient)?;
        }
        if self.half_exponent % 2 == 0 {
            write!(f, "n^{}", self.half_exponent / 2)
        } else {
            write!(f, "n^({}/2)", self.half_exponent)
        }
    }
}

impl Serialize for HalfPowerScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarJson {
            coefficient: self.coefficient.to_string(),
            half_exponent: self.half_exponent,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HalfPowerScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ScalarJson::deserialize(deserializer)?;
        let coefficient: BigRational = raw
            .coefficient
            .parse()
            .map_err(|e| D::Error::custom(format!("bad rational: {e}")))?;
        Ok(HalfPowerScalar::new(coefficient, raw.half_exponent))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    coefficient: String,
    half_exponent: i64,
}

/// Value of a scalar at a concrete dimension `n`: `rational` when
/// `carries_sqrt` is false, `rational * sqrt(n)` when true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub rational: BigRational,
    pub carries_sqrt: bool,
}

impl Evaluation {
    pub fn mul(&self, other: &Evaluation, n: i64) -> Evaluation {
        let mut rational = &self.rational * &other.rational;
        let carries_sqrt = self.carries_sqrt != other.carries_sqrt;
        if self.carries_sqrt && other.carries_sqrt {
            rational *= BigRational::from_integer(BigInt::from(n));
        }
        Evaluation {
            rational,
            carries_sqrt,
        }
    }
}

fn rational_power(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mag = exp.unsigned_abs() as u32;
    let powered = BigRational::new(base.numer().pow(mag), base.denom().pow(mag));
    if exp > 0 {
        powered
    } else {
        powered.recip()
    }
}

fn integer_sqrt(n: i64) -> i64 {
    debug_assert!(n >= 0);
    let mut root = (n as f64).sqrt() as i64;
    while root > 0 && root * root > n {
        root -= 1;
    }
    while (root + 1) * (root + 1) <= n {
        root += 1;
    }
    root
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zero_is_unique() {
        let z = HalfPowerScalar::new(BigRational::zero(), 7);
        assert_eq!(z, HalfPowerScalar::zero());
        assert_eq!(z.half_exponent(), 0);
    }

    #[test]
    fn multiplication_adds_exponents() {
        let a = HalfPowerScalar::new(rat(2, 3), 1);
        let b = HalfPowerScalar::new(rat(3, 4), -3);
        let c = a.mul(&b);
        assert_eq!(c.coefficient(), &rat(1, 2));
        assert_eq!(c.half_exponent(), -2);
    }

    #[test]
    fn addition_requires_like_exponents() {
        let a = HalfPowerScalar::half_power(2);
        let b = HalfPowerScalar::half_power(4);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_add(&HalfPowerScalar::zero()).is_ok());
        let sum = a.checked_add(&a).unwrap();
        assert_eq!(sum.coefficient(), &rat(2, 1));
        // cancellation collapses to canonical zero
        let diff = a.checked_add(&a.neg()).unwrap();
        assert_eq!(diff, HalfPowerScalar::zero());
    }

    #[test]
    fn evaluation_even_exponent() {
        let s = HalfPowerScalar::new(rat(3, 2), 4);
        let v = s.evaluate(3).unwrap();
        assert_eq!(v.rational, rat(27, 2));
        assert!(!v.carries_sqrt);
    }

    #[test]
    fn evaluation_odd_exponent_perfect_square() {
        let s = HalfPowerScalar::half_power(1);
        let v = s.evaluate(9).unwrap();
        assert_eq!(v.rational, rat(3, 1));
        assert!(!v.carries_sqrt);
        let s = HalfPowerScalar::half_power(-1);
        let v = s.evaluate(4).unwrap();
        assert_eq!(v.rational, rat(1, 2));
        assert!(!v.carries_sqrt);
    }

    #[test]
    fn evaluation_odd_exponent_residual_root() {
        let s = HalfPowerScalar::half_power(3);
        let v = s.evaluate(2).unwrap();
        // 2^(3/2) = 2 * sqrt(2)
        assert_eq!(v.rational, rat(2, 1));
        assert!(v.carries_sqrt);
        let s = HalfPowerScalar::half_power(-1);
        let v = s.evaluate(2).unwrap();
        // 2^(-1/2) = (1/2) * sqrt(2)
        assert_eq!(v.rational, rat(1, 2));
        assert!(v.carries_sqrt);
    }

    #[test]
    fn evaluation_products_match() {
        // evaluate(a*b) == evaluate(a)*evaluate(b) at several dimensions
        let scalars = [
            HalfPowerScalar::new(rat(2, 1), 1),
            HalfPowerScalar::new(rat(-1, 3), -1),
            HalfPowerScalar::new(rat(5, 2), 0),
            HalfPowerScalar::half_power(3),
        ];
        for n in [2i64, 3, 4, 9] {
            for a in &scalars {
                for b in &scalars {
                    let lhs = a.mul(b).evaluate(n).unwrap();
                    let rhs = a.evaluate(n).unwrap().mul(&b.evaluate(n).unwrap(), n);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(HalfPowerScalar::one().evaluate(0).is_err());
    }
}
