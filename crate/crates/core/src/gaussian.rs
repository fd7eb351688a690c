//! Exact arithmetic in the Gaussian rationals ℚ(i).

use alloc::string::String;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `re + i·im` of ℚ(i). Both parts are kept in lowest terms
/// (guaranteed by [`BigRational`]).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

pub type Gq = GaussianRational;

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn imag(im: BigRational) -> Self {
        Self { re: BigRational::zero(), im }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::imag(BigRational::one())
    }

    /// `re + i·im` from small integer fractions, convenient for literals.
    pub fn parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|² as a rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Ok(Self { re: num.re / &n, im: num.im / n })
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one().checked_div(self)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power allowing negative exponents.
    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Whether the leading nonzero part is negative. Used to pull signs out
    /// of rendered sums.
    pub fn is_negative_lead(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.im.is_zero() && self.re.is_negative()
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(BigRational::one())
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::real(r)
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, rhs: &Gq) -> Gq {
        Gq { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, rhs: &Gq) -> Gq {
        Gq { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, rhs: &Gq) -> Gq {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Gq::real(&self.re * &rhs.re);
        }
        Gq {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, rhs: Gq) -> Gq {
        &self + &rhs
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, rhs: Gq) -> Gq {
        &self - &rhs
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, rhs: Gq) -> Gq {
        &self * &rhs
    }
}

/// Panics on division by zero; use [`GaussianRational::checked_div`] when the
/// divisor is not known to be nonzero.
impl Div for Gq {
    type Output = Gq;
    fn div(self, rhs: Gq) -> Gq {
        self.checked_div(&rhs).expect("division by zero in ℚ(i)")
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re, im: -self.im }
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, rhs: &Gq) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Gq> for Gq {
    fn sub_assign(&mut self, rhs: &Gq) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Gq> for Gq {
    fn mul_assign(&mut self, rhs: &Gq) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        alloc::format!("{}", r.numer())
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `a`, `b*i`, `i`, `-i` or `(a + b*i)`; the output re-parses with
/// the expression grammar.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re_zero = self.re.is_zero();
        let im_zero = self.im.is_zero();
        let imag = |im: &BigRational| -> String {
            if im.is_one() {
                String::from("i")
            } else if (-im).is_one() {
                String::from("-i")
            } else {
                alloc::format!("{}*i", fmt_rational(im))
            }
        };
        match (re_zero, im_zero) {
            (true, true) => f.write_str("0"),
            (false, true) => f.write_str(&fmt_rational(&self.re)),
            (true, false) => f.write_str(&imag(&self.im)),
            (false, false) => {
                let (sign, mag) = if self.im.is_negative() {
                    ("-", -self.im.clone())
                } else {
                    ("+", self.im.clone())
                };
                write!(f, "({} {} {})", fmt_rational(&self.re), sign, imag(&mag))
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squared_is_minus_one() {
        let i = Gq::i();
        assert_eq!(&i * &i, Gq::from_int(-1));
    }

    #[test]
    fn rationalize_division() {
        let num = Gq::one();
        let den = Gq::parts((0, 1), (-3, 1));
        assert_eq!(num.checked_div(&den).unwrap(), Gq::parts((0, 1), (1, 3)));
    }

    #[test]
    fn modulus_squared() {
        let a = Gq::parts((2, 3), (1, 1));
        let b = Gq::parts((2, 3), (-1, 1));
        assert_eq!(&a * &b, Gq::from_frac(13, 9));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(Gq::one().checked_div(&Gq::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn lowest_terms() {
        let a = Gq::from_frac(6, -4);
        assert_eq!(a.re.numer(), &BigInt::from(-3));
        assert_eq!(a.re.denom(), &BigInt::from(2));
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", Gq::parts((1, 2), (-3, 1))), "(1/2 - 3*i)");
        assert_eq!(alloc::format!("{}", Gq::parts((0, 1), (-1, 1))), "-i");
        assert_eq!(alloc::format!("{}", Gq::from_frac(-5, 3)), "-5/3");
    }

    #[test]
    fn negative_powers() {
        let a = Gq::parts((0, 1), (2, 1));
        assert_eq!(a.powi(-2).unwrap(), Gq::from_frac(-1, 4));
    }
}
