//! The two scalar paths: complex `f64` and exact Gaussian rationals.
//!
//! Everything numeric in the crate is generic over [`Scalar`], so the same
//! polynomial and interpolation code runs either in floating point or with
//! no rounding at all.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Complex double precision scalar.
pub type C64 = Complex<f64>;

/// Exact Gaussian rational `a + b i` with `a, b` arbitrary-precision rationals.
pub type Exact = Complex<BigRational>;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    /// Converts a finite `f64`. Exact on the rational path, since every
    /// finite double is a dyadic rational.
    fn from_f64(x: f64) -> Self;

    fn from_ratio(r: &BigRational) -> Self;

    fn from_complex(z: C64) -> Self;

    fn to_complex(&self) -> C64;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(&BigRational::from_integer(BigInt::from(n)))
    }

    fn modulus(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Self {
        Complex::new(x, 0.0)
    }

    fn from_ratio(r: &BigRational) -> Self {
        Complex::new(ratio_to_f64(r), 0.0)
    }

    fn from_complex(z: C64) -> Self {
        z
    }

    fn to_complex(&self) -> C64 {
        *self
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
}

impl Scalar for Exact {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Self {
        Complex::new(f64_to_ratio(x), BigRational::zero())
    }

    fn from_ratio(r: &BigRational) -> Self {
        Complex::new(r.clone(), BigRational::zero())
    }

    fn from_complex(z: C64) -> Self {
        Complex::new(f64_to_ratio(z.re), f64_to_ratio(z.im))
    }

    fn to_complex(&self) -> C64 {
        Complex::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

/// Exact conversion of a finite double. Panics on NaN or infinity, which
/// can never be a valid exact-path input.
pub fn f64_to_ratio(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| panic!("non-finite value {x} on the exact path"))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact Gaussian rational from numerator/denominator pairs.
pub fn exact(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Exact {
    Complex::new(
        BigRational::new(re_num.into(), re_den.into()),
        BigRational::new(im_num.into(), im_den.into()),
    )
}

/// Exact real integer.
pub fn exact_int(n: i64) -> Exact {
    Exact::from_i64(n)
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Parses `"p"`, `"p/q"` or a decimal literal into an exact rational.
pub fn parse_ratio(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    if let Ok(n) = text.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    let x: f64 = text.parse().ok()?;
    BigRational::from_float(x)
}

/// Formats an exact rational as `p` or `p/q`.
pub fn format_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
