//! Exact field arithmetic over the Gaussian rationals Q(i).
//!
//! Every quantity in this crate (partition-function values, matrix entries,
//! formal-sum coefficients) is a `GaussianRational`, so rank, determinant,
//! and identity checks are exact rather than approximate.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element `a + b·i` of Q(i). Both parts are arbitrary-precision
/// rationals kept in lowest terms with positive denominators, so equality
/// is plain structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        GaussianRational::new(
            BigRational::from_integer(BigInt::from(v)),
            BigRational::zero(),
        )
    }

    /// Real rational `num/den`; `den` must be nonzero.
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator(format!("{num}/{den}")));
        }
        Ok(GaussianRational::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        ))
    }

    /// `a/b + (c/d)i`; both denominators must be nonzero.
    pub fn complex(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Result<Self> {
        if re_den == 0 || im_den == 0 {
            return Err(Error::ZeroDenominator(format!(
                "{re_num}/{re_den}+{im_num}/{im_den}i"
            )));
        }
        Ok(GaussianRational::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        ))
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² = re² + im², a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inverse()?)
    }

    /// Integer power by repeated squaring. Negative exponents invert first,
    /// so `0^k` errors for `k < 0`.
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let (base, mut e) = if exp < 0 {
            (self.inverse()?, exp.unsigned_abs())
        } else {
            (self.clone(), exp as u64)
        };
        let mut acc = GaussianRational::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// `Some(n)` when the value is a nonnegative rational integer.
    pub fn as_nonneg_integer(&self) -> Option<usize> {
        if !self.im.is_zero() || !self.re.is_integer() || self.re.is_negative() {
            return None;
        }
        let n = self.re.to_integer();
        let (_, digits) = n.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => usize::try_from(digits[0]).ok(),
            _ => None,
        }
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical literal: `a`, `bi`, or `a±bi`, each part `n` or `n/d` in
    /// lowest terms. Round-trips through `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_rational(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", fmt_rational(&self.im))
        } else if self.im.is_negative() {
            write!(
                f,
                "{}-{}i",
                fmt_rational(&self.re),
                fmt_rational(&-self.im.clone())
            )
        } else {
            write!(f, "{}+{}i", fmt_rational(&self.re), fmt_rational(&self.im))
        }
    }
}

/// Parses one rational literal: `INT` or `INT/POSINT`. A leading `+` is
/// accepted only when `allow_plus` is set (the imaginary part of `a+bi`).
fn parse_rational(text: &str, full: &str, allow_plus: bool) -> Result<BigRational> {
    let malformed = || Error::MalformedScalar(full.to_string());
    let body = match text.strip_prefix('+') {
        Some(rest) if allow_plus => rest,
        Some(_) => return Err(malformed()),
        None => text,
    };
    let (num_text, den_text) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let unsigned = num_text.strip_prefix('-').unwrap_or(num_text);
    if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let numer: BigInt = num_text.parse().map_err(|_| malformed())?;
    let denom: BigInt = match den_text {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            let d: BigInt = d.parse().map_err(|_| malformed())?;
            if d.is_zero() {
                return Err(Error::ZeroDenominator(full.to_string()));
            }
            d
        }
    };
    Ok(BigRational::new(numer, denom))
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Grammar: `RAT`, `RAT i`, or `RAT ± RAT i`, with `RAT := INT | INT '/' POSINT`.
    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        if text.is_empty() {
            return Err(Error::MalformedScalar(s.to_string()));
        }
        // A sign past position 0 separates real and imaginary parts; inside
        // either part signs can only appear at the front.
        let sep = text
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(idx, _)| idx);
        match sep {
            None => match text.strip_suffix('i') {
                Some(imag) => Ok(GaussianRational::new(
                    BigRational::zero(),
                    parse_rational(imag, text, false)?,
                )),
                None => Ok(GaussianRational::new(
                    parse_rational(text, text, false)?,
                    BigRational::zero(),
                )),
            },
            Some(pos) => {
                let re = parse_rational(&text[..pos], text, false)?;
                let imag = text[pos..]
                    .strip_suffix('i')
                    .ok_or_else(|| Error::MalformedScalar(text.to_string()))?;
                Ok(GaussianRational::new(re, parse_rational(imag, text, true)?))
            }
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}
