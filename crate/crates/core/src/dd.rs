//! Double-double arithmetic for long orbit loops.
//!
//! A [`Dd`] is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant digits. Only the operations the orbit code needs
//! are provided: add, sub, mul, div, sqrt and conversion.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Square root by one Newton correction of the f64 estimate.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let sq = Dd::new(s) * Dd::new(s);
        let r = (self - sq).to_f64();
        Dd::new(s) + Dd::new(r / (2.0 * s))
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, mut e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        e += t;
        let (s, mut e) = quick_two_sum(s, e);
        e += f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let mut e = self.hi.mul_add(o.hi, -p);
        e += self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: f64) -> Dd {
        let p = self.hi * o;
        let mut e = self.hi.mul_add(o, -p);
        e += self.lo * o;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: DdComplex = DdComplex { re: Dd::ONE, im: Dd::ZERO };

    pub fn new(re: Dd, im: Dd) -> Self {
        DdComplex { re, im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(self) -> Self {
        DdComplex { re: self.re, im: -self.im }
    }

    /// Rescale to unit modulus; used to normalize rotation multipliers.
    pub fn normalized(self) -> Self {
        let s = self.norm_sqr().sqrt();
        DdComplex { re: self.re / s, im: self.im / s }
    }
}

impl From<Complex64> for DdComplex {
    fn from(c: Complex64) -> Self {
        DdComplex { re: Dd::new(c.re), im: Dd::new(c.im) }
    }
}

impl From<DdComplex> for Complex64 {
    fn from(c: DdComplex) -> Self {
        Complex64::new(c.re.to_f64(), c.im.to_f64())
    }
}

impl Add for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn add(self, o: Self) -> Self {
        DdComplex { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn sub(self, o: Self) -> Self {
        DdComplex { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn neg(self) -> Self {
        DdComplex { re: -self.re, im: -self.im }
    }
}

impl Mul for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn mul(self, o: Self) -> Self {
        DdComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for DdComplex {
    type Output = DdComplex;
    #[inline]
    fn div(self, o: Self) -> Self {
        let d = o.norm_sqr();
        let n = self * o.conj();
        DdComplex { re: n.re / d, im: n.im / d }
    }
}

/// The arithmetic the map formulas are written against, so one generic
/// implementation serves both `Complex64` and `DdComplex`.
pub trait ComplexField:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64(c: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn zero() -> Self;
    fn one() -> Self;
    fn scale(self, s: f64) -> Self;
}

impl ComplexField for Complex64 {
    #[inline]
    fn from_c64(c: Complex64) -> Self {
        c
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self
    }
    #[inline]
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    #[inline]
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl ComplexField for DdComplex {
    #[inline]
    fn from_c64(c: Complex64) -> Self {
        c.into()
    }
    #[inline]
    fn to_c64(self) -> Complex64 {
        self.into()
    }
    #[inline]
    fn zero() -> Self {
        DdComplex::ZERO
    }
    #[inline]
    fn one() -> Self {
        DdComplex::ONE
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        DdComplex { re: self.re * s, im: self.im * s }
    }
}
