//! Exact Gaussian-rational scalars: complex numbers with rational real and
//! imaginary parts, kept in reduced form by `num-rational`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("malformed rational `{0}` (expected `p`, `p/q`, or a decimal)")]
pub struct RationalParseError(String);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Round to double-precision complex; exact when numerators and
    /// denominators are small.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn fmt_rational(r: &BigRational) -> String {
        if r.denom().is_one() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    /// Parse one rational: integer `p`, fraction `p/q`, or a plain decimal
    /// like `-0.25` (converted exactly).
    pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
        let t = text.trim();
        let bad = || RationalParseError(text.to_string());
        if let Some((p, q)) = t.split_once('/') {
            let num: BigInt = p.trim().parse().map_err(|_| bad())?;
            let den: BigInt = q.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(BigRational::new(num, den));
        }
        if let Some((int_part, frac_part)) = t.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int_part.trim_start().starts_with('-');
            let int: BigInt = if int_part.is_empty() || int_part == "-" {
                BigInt::zero()
            } else {
                int_part.parse().map_err(|_| bad())?
            };
            let frac_num: BigInt = frac_part.parse().map_err(|_| bad())?;
            let den = BigInt::from(10u32).pow(frac_part.len() as u32);
            let frac = BigRational::new(frac_num, den);
            let whole = BigRational::from_integer(int);
            return Ok(if negative { whole - frac } else { whole + frac });
        }
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

impl fmt::Display for GaussianRational {
    /// `re im` pair rendering used by the polynomial file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            Self::fmt_rational(&self.re),
            Self::fmt_rational(&self.im)
        )
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl GaussianRational {
    /// |z|^2 as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs_as_f64(&self) -> f64 {
        self.norm_sqr().to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        GaussianRational::parse_rational(s).unwrap()
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = GaussianRational::new(q("1/3"), q("1/2"));
        let b = GaussianRational::new(q("2/3"), q("-1/2"));
        let sum = &a + &b;
        assert_eq!(sum, GaussianRational::one());
        let prod = &a * &GaussianRational::i();
        assert_eq!(prod, GaussianRational::new(q("-1/2"), q("1/3")));
        assert_eq!(&a - &a, GaussianRational::zero());
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn conjugation_and_norm() {
        let a = GaussianRational::new(q("3"), q("4"));
        assert_eq!((&a * &a.conj()).re, q("25"));
        assert_eq!(a.norm_sqr(), q("25"));
        assert_eq!(a.abs_as_f64(), 5.0);
        assert_eq!(a.conj().conj(), a);
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(q("5"), BigRational::from_integer(5.into()));
        assert_eq!(q("-7/2"), q("-3.5"));
        assert_eq!(q("0.25"), q("1/4"));
        assert_eq!(q("-0.25"), q("-1/4"));
        assert!(GaussianRational::parse_rational("1/0").is_err());
        assert!(GaussianRational::parse_rational("x").is_err());
        assert!(GaussianRational::parse_rational("1.").is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "1", "-1", "2/3", "-5/7"] {
            let r = q(s);
            assert_eq!(GaussianRational::fmt_rational(&r), s);
        }
    }

    #[test]
    fn complex_conversion() {
        let a = GaussianRational::new(q("1/2"), q("-1/4"));
        let c = a.to_complex();
        assert_eq!(c.re, 0.5);
        assert_eq!(c.im, -0.25);
    }
}
