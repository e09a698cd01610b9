//! Gaussian rationals over arbitrary-precision integers.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use super::Ring;

/// Exact complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::real(rat(num, den))
    }

    /// `(re_num/re_den) + i (im_num/im_den)`; panics on a zero denominator.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        CRational {
            re: rat(re_num, re_den),
            im: rat(im_num, im_den),
        }
    }

    pub fn i() -> Self {
        CRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(CRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Compact `p/q` or `p/q+r/si` rendering used in reports.
    pub fn to_exact_string(&self) -> String {
        if self.im.is_zero() {
            return self.re.to_string();
        }
        if self.re.is_zero() {
            return format!("{}i", self.im);
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        format!("{}{}{}i", self.re, sign, self.im.abs())
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Correctly scaled conversion; numerator and denominator may exceed the f64 range.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    // integer quotient with about 64 significant bits, then rescale
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let k = db - nb + 64;
    let q = if k >= 0 {
        (r.numer() << (k as usize)) / r.denom()
    } else {
        r.numer() / (r.denom() << ((-k) as usize))
    };
    let mut v = q.to_f64().unwrap_or(f64::NAN);
    let mut e = -k;
    // apply 2^e in steps that stay inside the exponent range
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}

/// Exact dyadic image of a finite float.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl From<i64> for CRational {
    fn from(n: i64) -> Self {
        CRational::from_int(n)
    }
}

impl From<BigRational> for CRational {
    fn from(r: BigRational) -> Self {
        CRational::real(r)
    }
}

impl<'a> Add<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn add(self, o: &CRational) -> CRational {
        CRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn sub(self, o: &CRational) -> CRational {
        CRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn mul(self, o: &CRational) -> CRational {
        if self.im.is_zero() && o.im.is_zero() {
            return CRational::real(&self.re * &o.re);
        }
        CRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn div(self, o: &CRational) -> CRational {
        self.checked_div(o).expect("division by zero")
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CRational> for CRational {
            type Output = CRational;
            fn $m(self, o: CRational) -> CRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a CRational> for CRational {
            type Output = CRational;
            fn $m(self, o: &CRational) -> CRational {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        -&self
    }
}

impl AddAssign<&CRational> for CRational {
    fn add_assign(&mut self, o: &CRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&CRational> for CRational {
    fn sub_assign(&mut self, o: &CRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl Zero for CRational {
    fn zero() -> Self {
        CRational::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CRational {
    fn one() -> Self {
        CRational::from_int(1)
    }
}

impl Ring for CRational {
    fn zero() -> Self {
        <Self as Zero>::zero()
    }
    fn one() -> Self {
        <Self as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_with_huge_numerator_and_denominator() {
        let big = BigInt::from(3).pow(2000u32);
        let r = BigRational::new(&big * BigInt::from(7), &big * BigInt::from(2));
        assert_eq!(rat_to_f64(&r), 3.5);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(2).pow(1030u32));
        // 2^{-1030} is subnormal: mantissa bit 1074 − 1030
        assert_eq!(rat_to_f64(&tiny), f64::from_bits(1u64 << 44));
        let neg = BigRational::new(-(&big) * BigInt::from(5), big.clone() * BigInt::from(4));
        assert_eq!(rat_to_f64(&neg), -1.25);
    }

    #[test]
    fn field_operations_are_exact() {
        let a = CRational::from_parts(1, 3, -2, 5);
        let b = CRational::from_parts(7, 2, 1, 9);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert!(CRational::default().inv().is_none());
        assert_eq!(&CRational::i() * &CRational::i(), CRational::from_int(-1));
    }

    #[test]
    fn float_image_of_huge_rationals() {
        let big = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(7) << 1998usize);
        assert!((rat_to_f64(&big) - 12.0 / 7.0).abs() < 1e-15);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(3) << 1100usize);
        assert_eq!(rat_to_f64(&tiny), 0.0);
        assert_eq!(rat_to_f64(&rat_from_f64(0.1)), 0.1);
    }

    #[test]
    fn exact_string_forms() {
        assert_eq!(CRational::from_frac(-7, 6).to_exact_string(), "-7/6");
        assert_eq!(CRational::from_parts(1, 2, -1, 3).to_exact_string(), "1/2-1/3i");
        assert_eq!(CRational::from_parts(0, 1, 2, 1).to_exact_string(), "2i");
    }
}
