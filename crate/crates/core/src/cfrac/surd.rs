//! Exact real quadratic irrationals `(u + v√d)/w`.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

/// Largest trial divisor used when extracting square factors from the radicand.
const SQUAREFREE_TRIAL_LIMIT: u64 = 2_000_000;

/// A real quadratic irrational `(u + v√d)/w`.
///
/// Stored canonically: `w > 0`, `v ≠ 0`, `gcd(u, v, w) = 1`, and `d > 1`
/// free of the square factors found by trial division (all of them for
/// radicands below roughly `2^62`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    u: Integer,
    v: Integer,
    d: Integer,
    w: Integer,
}

/// Outcome of building a surd from raw parts: a perfect-square radicand or
/// `v = 0` collapses to a rational.
pub enum SurdOrRational {
    Surd(QuadraticSurd),
    Rational(Rational),
}

impl QuadraticSurd {
    pub fn new(u: Integer, v: Integer, d: Integer, w: Integer) -> Result<SurdOrRational> {
        if w.cmp0() == Ordering::Equal {
            return Err(Error::Parse("zero denominator in quadratic angle".into()));
        }
        if d.cmp0() != Ordering::Greater {
            return Err(Error::Parse("radicand must be positive".into()));
        }
        let (square, core) = split_square(d);
        let v = v * square;
        if v.cmp0() == Ordering::Equal || core == 1 {
            let num = u + v;
            return Ok(SurdOrRational::Rational(Rational::from((num, w))));
        }
        Ok(SurdOrRational::Surd(Self::canonical(u, v, core, w)))
    }

    /// Builds without radicand reduction; `d` must already be squarefree and
    /// nonsquare, and is shared with the surd this value derives from.
    fn canonical(mut u: Integer, mut v: Integer, d: Integer, mut w: Integer) -> Self {
        if w.cmp0() == Ordering::Less {
            u = -u;
            v = -v;
            w = -w;
        }
        let g = Integer::from(u.gcd_ref(&v));
        let g = g.gcd(&w);
        if g != 1 {
            u /= &g;
            v /= &g;
            w /= &g;
        }
        QuadraticSurd { u, v, d, w }
    }

    pub fn u(&self) -> &Integer {
        &self.u
    }
    pub fn v(&self) -> &Integer {
        &self.v
    }
    pub fn d(&self) -> &Integer {
        &self.d
    }
    pub fn w(&self) -> &Integer {
        &self.w
    }

    /// Bit width of the largest stored integer.
    pub fn width_bits(&self) -> u32 {
        [&self.u, &self.v, &self.d, &self.w]
            .iter()
            .map(|x| x.significant_bits())
            .max()
            .unwrap_or(0)
    }

    /// Exact `⌊x⌋`.
    pub fn floor(&self) -> Integer {
        // v√d lies strictly between two consecutive integers, so the floor of
        // the quotient only depends on the lower one.
        let rad = Integer::from(self.v.square_ref()) * &self.d;
        let s = rad.sqrt();
        let lower = if self.v.cmp0() == Ordering::Greater {
            Integer::from(&self.u + &s)
        } else {
            Integer::from(&self.u - &s) - 1u32
        };
        let (q, _) = lower.div_rem_floor(self.w.clone());
        q
    }

    pub fn sub_integer(&self, k: &Integer) -> Self {
        let u = &self.u - Integer::from(k * &self.w);
        QuadraticSurd::canonical(u, self.v.clone(), self.d.clone(), self.w.clone())
    }

    pub fn add_integer(&self, k: &Integer) -> Self {
        let u = &self.u + Integer::from(k * &self.w);
        QuadraticSurd::canonical(u, self.v.clone(), self.d.clone(), self.w.clone())
    }

    pub fn mul_integer(&self, m: &Integer) -> Self {
        QuadraticSurd::canonical(
            Integer::from(&self.u * m),
            Integer::from(&self.v * m),
            self.d.clone(),
            self.w.clone(),
        )
    }

    /// `x − ⌊x⌋`.
    pub fn frac(&self) -> Self {
        self.sub_integer(&self.floor())
    }

    /// `1/x = w(u − v√d)/(u² − v²d)`.
    pub fn recip(&self) -> Self {
        let norm = self.norm_numerator();
        QuadraticSurd::canonical(
            Integer::from(&self.w * &self.u),
            -Integer::from(&self.w * &self.v),
            self.d.clone(),
            norm,
        )
    }

    /// `u² − v²d`, never zero for an irrational value.
    fn norm_numerator(&self) -> Integer {
        Integer::from(self.u.square_ref()) - Integer::from(self.v.square_ref()) * &self.d
    }

    /// Sign of `a + b√d` for integers `a`, `b`.
    fn sign_of(a: &Integer, b: &Integer, d: &Integer) -> Ordering {
        let sa = a.cmp0();
        let sb = b.cmp0();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²d
        let a2 = Integer::from(a.square_ref());
        let b2d = Integer::from(b.square_ref()) * d;
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        // sign(x − p/q) = sign(q u − p w + q v √d)
        let (p, q) = (r.numer(), r.denom());
        let a = Integer::from(q * &self.u) - Integer::from(p * &self.w);
        let b = Integer::from(q * &self.v);
        Self::sign_of(&a, &b, &self.d)
    }

    pub fn is_positive(&self) -> bool {
        Self::sign_of(&self.u, &self.v, &self.d) == Ordering::Greater
    }

    /// Evaluation to `prec` bits without cancellation: when `u` and `v√d`
    /// have opposite signs the conjugate form `(u² − v²d)/(w(u − v√d))` is used.
    pub fn to_float(&self, prec: u32) -> Float {
        let work = prec + 16 + 2 * self.width_bits().min(64);
        let sqrt_d = Float::with_val(work, &self.d).sqrt();
        let same_sign = self.u.cmp0() == Ordering::Equal || self.u.cmp0() == self.v.cmp0();
        let value = if same_sign {
            let num = Float::with_val(work, &sqrt_d * &self.v) + &self.u;
            num / &self.w
        } else {
            let conj = Float::with_val(work, &self.u) - Float::with_val(work, &sqrt_d * &self.v);
            let den = conj * &self.w;
            Float::with_val(work, &self.norm_numerator()) / den
        };
        Float::with_val(prec, &value)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quad:{},{},{},{}", self.u, self.v, self.d, self.w)
    }
}

/// Splits `d = s²·c` with `c` free of the square factors found by trial
/// division up to the cube root (or a fixed limit).
fn split_square(d: Integer) -> (Integer, Integer) {
    if d.is_perfect_square() {
        return (d.sqrt(), Integer::from(1));
    }
    if let Some(small) = d.to_u64() {
        let (square, core) = split_square_u64(small);
        return (Integer::from(square), Integer::from(core));
    }
    let mut square = Integer::from(1);
    let mut core = Integer::from(1);
    let mut rest = d;
    let mut p: u32 = 2;
    while u64::from(p) <= SQUAREFREE_TRIAL_LIMIT && Integer::from(p).pow(3) <= rest {
        let mut count = 0u32;
        while rest.is_divisible_u(p) {
            rest /= p;
            count += 1;
        }
        for _ in 0..count / 2 {
            square *= p;
        }
        if count % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // What remains has at most two prime factors above the cube root.
    if rest > 1 && rest.is_perfect_square() {
        square *= rest.sqrt();
    } else {
        core *= rest;
    }
    (square, core)
}

fn split_square_u64(mut rest: u64) -> (u64, u64) {
    let mut square = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p <= SQUAREFREE_TRIAL_LIMIT && (p as u128).pow(3) <= rest as u128 {
        let mut count = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            count += 1;
        }
        square *= p.pow(count / 2);
        if count % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.isqrt();
    if rest > 1 && r * r == rest {
        square *= r;
    } else {
        core *= rest;
    }
    (square, core)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(u: i64, v: i64, d: i64, w: i64) -> QuadraticSurd {
        match QuadraticSurd::new(u.into(), v.into(), d.into(), w.into()).unwrap() {
            SurdOrRational::Surd(s) => s,
            SurdOrRational::Rational(_) => panic!("expected irrational"),
        }
    }

    #[test]
    fn radicand_is_reduced() {
        let s = surd(0, 1, 8, 1);
        assert_eq!(s.d(), &2);
        assert_eq!(s.v(), &2);
        let s = surd(3, 1, 45, 6);
        assert_eq!((s.u().clone(), s.v().clone(), s.d().clone(), s.w().clone()),
            (Integer::from(1), Integer::from(1), Integer::from(5), Integer::from(2)));
    }

    #[test]
    fn perfect_square_collapses() {
        match QuadraticSurd::new(1.into(), 1.into(), 9.into(), 2.into()).unwrap() {
            SurdOrRational::Rational(r) => assert_eq!(r, 2),
            SurdOrRational::Surd(_) => panic!(),
        }
    }

    #[test]
    fn floor_and_frac() {
        let phi = surd(1, 1, 5, 2);
        assert_eq!(phi.floor(), 1);
        assert_eq!(phi.frac(), surd(-1, 1, 5, 2));
        let neg = surd(-1, -1, 5, 2); // -1.618..
        assert_eq!(neg.floor(), -2);
        let x = surd(0, -1, 2, 1); // -1.414..
        assert_eq!(x.floor(), -2);
    }

    #[test]
    fn recip_of_golden() {
        let g = surd(-1, 1, 5, 2);
        assert_eq!(g.recip(), surd(1, 1, 5, 2));
    }

    #[test]
    fn conjugate_form_avoids_cancellation() {
        // √(10^20 + 1) − 10^10 ≈ 5e-11
        let big = Integer::from(10u64.pow(10));
        let d = Integer::from(big.square_ref()) + 1u32;
        let s = match QuadraticSurd::new(-big.clone(), 1.into(), d, 1.into()).unwrap() {
            SurdOrRational::Surd(s) => s,
            _ => unreachable!(),
        };
        let x = s.to_f64();
        let exact = 1.0 / (2.0 * 1e10) * (1.0 - 1.0 / (4.0 * 1e20));
        assert!(((x - exact) / exact).abs() < 1e-15);
    }

    #[test]
    fn rational_comparison() {
        let g = surd(-1, 1, 5, 2);
        assert_eq!(g.cmp_rational(&Rational::from((3, 5))), Ordering::Greater);
        assert_eq!(g.cmp_rational(&Rational::from((5, 8))), Ordering::Less);
    }
}
