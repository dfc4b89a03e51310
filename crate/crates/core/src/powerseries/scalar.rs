//! Coefficient arithmetic backends for the linearizer.
//!
//! Coefficients of a linearizing series grow or decay like `R^{-n}`, far
//! outside the `f64` exponent range for a few thousand terms, so the fast
//! backend keeps an `f64` complex mantissa next to a separate binary
//! exponent. The multiprecision backend uses MPFR/MPC at a chosen precision.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Serialize, Serializer};

/// `(re + i·im)·2^exp` with `max(|re|, |im|) ∈ [1/2, 1)`, or zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtComplex {
    re: f64,
    im: f64,
    exp: i64,
}

#[inline]
fn pow2(e: i64) -> f64 {
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e < -1022 {
        if e < -1074 {
            0.0
        } else {
            f64::from_bits(1u64 << (e + 1074))
        }
    } else {
        f64::INFINITY
    }
}

/// `x = f·2^e` with `|f| ∈ [1/2, 1)` for finite nonzero `x`.
#[inline]
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal
        let (f, e) = frexp(x * pow2(64));
        return (f, e - 64);
    }
    let e = raw - 1022;
    let f = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (f, e)
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex { re: 0.0, im: 0.0, exp: 0 };
    pub const ONE: ExtComplex = ExtComplex { re: 0.5, im: 0.0, exp: 1 };

    pub fn new(re: f64, im: f64, exp: i64) -> Self {
        ExtComplex { re, im, exp }.normalized()
    }

    pub fn from_c64(z: Complex64) -> Self {
        ExtComplex::new(z.re, z.im, 0)
    }

    pub fn from_mp(z: &Complex) -> Self {
        let (re, er) = z.real().to_f64_exp();
        let (im, ei) = z.imag().to_f64_exp();
        let e = i64::from(er.max(ei));
        if z.real().is_zero() {
            return ExtComplex::new(0.0, im, i64::from(ei));
        }
        if z.imag().is_zero() {
            return ExtComplex::new(re, 0.0, i64::from(er));
        }
        ExtComplex::new(re * pow2(i64::from(er) - e), im * pow2(i64::from(ei) - e), e)
    }

    #[inline]
    fn normalized(self) -> Self {
        let m = self.re.abs().max(self.im.abs());
        if m == 0.0 || !m.is_finite() {
            return if m == 0.0 { ExtComplex::ZERO } else { self };
        }
        let (_, e) = frexp(m);
        let s = pow2(-e);
        ExtComplex { re: self.re * s, im: self.im * s, exp: self.exp + e }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn mantissa(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// `ln|z|`, `-∞` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.re.hypot(self.im).ln() + self.exp as f64 * LN_2
    }

    /// Nearest `Complex64` (may overflow to infinity or underflow to zero).
    pub fn to_c64(&self) -> Complex64 {
        if self.exp > 1100 {
            return Complex64::new(self.re * f64::INFINITY, self.im * f64::INFINITY);
        }
        let s = pow2(self.exp.clamp(-1100, 1100) / 2);
        let t = pow2(self.exp.clamp(-1100, 1100) - self.exp.clamp(-1100, 1100) / 2);
        Complex64::new(self.re * s * t, self.im * s * t)
    }

    /// `z·2^k`, exact.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        ExtComplex { re: self.re, im: self.im, exp: self.exp + k }
    }

    #[inline]
    pub fn mul(&self, o: &Self) -> Self {
        ExtComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
            exp: self.exp + o.exp,
        }
        .normalized()
    }

    pub fn mul_c64(&self, z: Complex64) -> Self {
        self.mul(&ExtComplex::from_c64(z))
    }

    #[inline]
    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return *o;
        }
        if o.is_zero() {
            return *self;
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let s = pow2(small.exp - big.exp);
        ExtComplex { re: big.re + small.re * s, im: big.im + small.im * s, exp: big.exp }.normalized()
    }

    pub fn neg(&self) -> Self {
        ExtComplex { re: -self.re, im: -self.im, exp: self.exp }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn div(&self, o: &Self) -> Self {
        let z = self.mantissa() / o.mantissa();
        ExtComplex::new(z.re, z.im, self.exp - o.exp)
    }

    /// `Σ xs[i]·ys[len−1−i]`, aligned to the largest product exponent.
    pub fn dot_reversed(xs: &[ExtComplex], ys: &[ExtComplex]) -> ExtComplex {
        debug_assert_eq!(xs.len(), ys.len());
        let mut emax = i64::MIN;
        for (x, y) in xs.iter().zip(ys.iter().rev()) {
            if !x.is_zero() && !y.is_zero() {
                emax = emax.max(x.exp + y.exp);
            }
        }
        if emax == i64::MIN {
            return ExtComplex::ZERO;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for (x, y) in xs.iter().zip(ys.iter().rev()) {
            let d = x.exp + y.exp - emax;
            if d < -1074 || x.is_zero() || y.is_zero() {
                continue;
            }
            let s = pow2(d);
            re += (x.re * y.re - x.im * y.im) * s;
            im += (x.re * y.im + x.im * y.re) * s;
        }
        ExtComplex::new(re, im, emax)
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.16e}{:+.16e}i)·2^{}", self.re, self.im, self.exp)
    }
}

impl Serialize for ExtComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.re, self.im, self.exp).serialize(s)
    }
}

/// Arithmetic used by the linearizer; implemented for [`ExtComplex`] and
/// for MPC complex numbers at a fixed precision.
pub(crate) trait Backend: Sync {
    type C: Clone + Send + Sync;
    fn zero(&self) -> Self::C;
    fn from_mp(&self, z: &Complex) -> Self::C;
    /// `e^{2πit}`
    fn unit(&self, turns: &Float) -> Self::C;
    /// `e^{2πit} − 1`, accurate for small `t`.
    fn unit_minus_one(&self, turns: &Float) -> Self::C;
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn add_assign(&self, acc: &mut Self::C, x: &Self::C);
    fn sub_assign(&self, acc: &mut Self::C, x: &Self::C);
    fn div(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn dot_reversed(&self, xs: &[Self::C], ys: &[Self::C]) -> Self::C;
    fn to_ext(&self, z: &Self::C) -> ExtComplex;
    fn is_finite(&self, z: &Self::C) -> bool;
}

pub(crate) struct ExtBackend;

impl Backend for ExtBackend {
    type C = ExtComplex;
    fn zero(&self) -> ExtComplex {
        ExtComplex::ZERO
    }
    fn from_mp(&self, z: &Complex) -> ExtComplex {
        ExtComplex::from_mp(z)
    }
    fn unit(&self, turns: &Float) -> ExtComplex {
        let a = 2.0 * PI * turns.to_f64();
        ExtComplex::new(a.cos(), a.sin(), 0)
    }
    fn unit_minus_one(&self, turns: &Float) -> ExtComplex {
        // e^{2πit} − 1 = 2i sin(πt) e^{iπt}
        let a = PI * turns.to_f64();
        let (s, c) = a.sin_cos();
        ExtComplex::new(-2.0 * s * s, 2.0 * s * c, 0)
    }
    fn mul(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        a.mul(b)
    }
    fn add_assign(&self, acc: &mut ExtComplex, x: &ExtComplex) {
        *acc = acc.add(x);
    }
    fn sub_assign(&self, acc: &mut ExtComplex, x: &ExtComplex) {
        *acc = acc.sub(x);
    }
    fn div(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        a.div(b)
    }
    fn dot_reversed(&self, xs: &[ExtComplex], ys: &[ExtComplex]) -> ExtComplex {
        ExtComplex::dot_reversed(xs, ys)
    }
    fn to_ext(&self, z: &ExtComplex) -> ExtComplex {
        *z
    }
    fn is_finite(&self, z: &ExtComplex) -> bool {
        z.is_finite()
    }
}

pub(crate) struct MpBackend {
    pub prec: u32,
}

impl Backend for MpBackend {
    type C = Complex;
    fn zero(&self) -> Complex {
        Complex::new(self.prec)
    }
    fn from_mp(&self, z: &Complex) -> Complex {
        Complex::with_val(self.prec, z)
    }
    fn unit(&self, turns: &Float) -> Complex {
        let two_t = Float::with_val(self.prec + 8, turns * 2u32);
        let c = two_t.clone().cos_pi();
        let s = two_t.sin_pi();
        Complex::with_val(self.prec, (c, s))
    }
    fn unit_minus_one(&self, turns: &Float) -> Complex {
        let t = Float::with_val(self.prec + 8, turns);
        let s = t.clone().sin_pi();
        let c = t.cos_pi();
        let re = Float::with_val(self.prec + 8, s.square_ref()) * -2i32;
        let im = Float::with_val(self.prec + 8, &s * &c) * 2u32;
        Complex::with_val(self.prec, (re, im))
    }
    fn mul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.prec, a * b)
    }
    fn add_assign(&self, acc: &mut Complex, x: &Complex) {
        *acc += x;
    }
    fn sub_assign(&self, acc: &mut Complex, x: &Complex) {
        *acc -= x;
    }
    fn div(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.prec, a / b)
    }
    fn dot_reversed(&self, xs: &[Complex], ys: &[Complex]) -> Complex {
        let mut acc = Complex::new(self.prec);
        for (x, y) in xs.iter().zip(ys.iter().rev()) {
            acc += x * y;
        }
        acc
    }
    fn to_ext(&self, z: &Complex) -> ExtComplex {
        ExtComplex::from_mp(z)
    }
    fn is_finite(&self, z: &Complex) -> bool {
        z.real().is_finite() && z.imag().is_finite()
    }
}
