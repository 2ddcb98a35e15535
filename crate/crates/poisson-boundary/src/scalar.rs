//! Coefficient fields.
//!
//! Exact mode works over Gaussian rationals `Complex<BigRational>`; float mode over
//! `Complex<f64>`. The real parts live in [`Real`] so that weights share the same field.

use std::fmt;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Result};

/// Absolute tolerance used by float mode for zero tests.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Exact Gaussian rational.
pub type Exact = Complex<BigRational>;
/// Float complex scalar.
pub type Float = Complex64;

/// Ordered real field used for weights and real parts.
pub trait Real: Clone + fmt::Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    const MODE: Mode;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn approx_eq(&self, o: &Self) -> bool;
    fn to_f64(&self) -> f64;
    fn to_repr(&self) -> String;
    fn parse_repr(s: &str) -> Result<Self>;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Real for BigRational {
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn approx_eq(&self, o: &Self) -> bool {
        self == o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_repr(&self) -> String {
        rational_repr(self)
    }
    fn parse_repr(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Real for f64 {
    const MODE: Mode = Mode::Float;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_TOL
    }
    fn approx_eq(&self, o: &Self) -> bool {
        (self - o).abs() <= FLOAT_TOL * (1.0f64).max(self.abs()).max(o.abs())
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_repr(&self) -> String {
        format!("{:?}", self)
    }
    fn parse_repr(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| parse_err(s, "not a number"))?;
            let d: f64 = d.trim().parse().map_err(|_| parse_err(s, "not a number"))?;
            return Ok(n / d);
        }
        s.parse().map_err(|_| parse_err(s, "not a number"))
    }
}

/// Canonical string for a rational: `p` or `p/q`.
pub fn rational_repr(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q`, or a terminating decimal such as `0.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || parse_err(s, "expected an exact rational like 1/3");
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(parse_err(s, "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Coefficient ring for operators and algebra elements.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Real: Real;
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(r: &Self::Real) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Exact zero test in exact mode, toleranced in float mode.
    fn is_zero(&self) -> bool;
    /// Numeric value, used for reporting and float comparisons.
    fn to_c64(&self) -> Complex64;

    fn scale(&self, r: &Self::Real) -> Self {
        self.mul(&Self::from_real(r))
    }
    fn from_i64(n: i64) -> Self {
        Self::from_real(&Self::Real::from_ratio(n, 1))
    }
    fn approx_eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
    fn abs_diff(&self, o: &Self) -> f64 {
        (self.to_c64() - o.to_c64()).norm()
    }
}

/// Scalars with exact (or floating) division and access to real/imaginary parts.
pub trait Field: Scalar {
    fn inv(&self) -> Self;
    fn from_parts(re: Self::Real, im: Self::Real) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

impl Scalar for Exact {
    type Real = BigRational;
    const MODE: Mode = Mode::Exact;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_real(r: &BigRational) -> Self {
        Complex::new(r.clone(), Zero::zero())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        if Zero::is_zero(&self.im) && Zero::is_zero(&o.im) {
            return Complex::new(&self.re * &o.re, Zero::zero());
        }
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(Real::to_f64(&self.re), Real::to_f64(&self.im))
    }
    fn scale(&self, r: &BigRational) -> Self {
        Complex::new(&self.re * r, &self.im * r)
    }
}

impl Field for Exact {
    fn inv(&self) -> Self {
        Complex::inv(self)
    }
    fn from_parts(re: BigRational, im: BigRational) -> Self {
        Complex::new(re, im)
    }
    fn re(&self) -> BigRational {
        self.re.clone()
    }
    fn im(&self) -> BigRational {
        self.im.clone()
    }
}

impl Scalar for Float {
    type Real = f64;
    const MODE: Mode = Mode::Float;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(r: &f64) -> Self {
        Complex64::new(*r, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.norm() <= FLOAT_TOL
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

impl Field for Float {
    fn inv(&self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
}

/// Serialized coefficient: real and imaginary parts as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffRepr {
    pub re: String,
    pub im: String,
}

pub fn coeff_repr<S: Field>(c: &S) -> CoeffRepr {
    CoeffRepr {
        re: c.re().to_repr(),
        im: c.im().to_repr(),
    }
}

pub fn parse_coeff<S: Field>(re: &str, im: &str) -> Result<S> {
    Ok(S::from_parts(S::Real::parse_repr(re)?, S::Real::parse_repr(im)?))
}

/// Gaussian rational from small integers, handy in tests and generators.
pub fn gauss(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Exact {
    Complex::new(
        BigRational::from_ratio(re_num, re_den),
        BigRational::from_ratio(im_num, im_den),
    )
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing_round_trips() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rational_repr(&rat(6, 4)), "3/2");
        assert_eq!(rational_repr(&rat(4, 2)), "2");
    }

    #[test]
    fn gaussian_field_ops() {
        let a = gauss(1, 2, 1, 1);
        let b = a.inv();
        assert!(Scalar::approx_eq(&a.mul(&b), &<Exact as Scalar>::one()));
        assert_eq!(Scalar::conj(&a), gauss(1, 2, -1, 1));
        let c = parse_coeff::<Exact>("1/2", "-3").unwrap();
        assert_eq!(c, gauss(1, 2, -3, 1));
        assert_eq!(coeff_repr(&c).im, "-3");
    }

    #[test]
    fn float_tolerances() {
        assert!(Scalar::is_zero(&Complex64::new(1e-14, 0.0)));
        assert!(!Scalar::is_zero(&Complex64::new(1e-9, 0.0)));
        assert!(Real::approx_eq(&(0.1 + 0.2), &0.3));
    }
}
