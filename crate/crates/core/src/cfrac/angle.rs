use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::surd::{QuadraticSurd, SurdOrRational};
use crate::{Error, Result};

/// Exact integers wider than this are refused by [`Angle::mul_mod1`].
pub const MAX_EXACT_BITS: u32 = 1 << 16;

/// A decimal or dyadic approximation of a real angle: the true value lies
/// within `2^-bits` of `center`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealAngle {
    pub center: Rational,
    pub bits: u32,
}

/// An angle `θ`, always interpreted modulo 1 where it matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Angle {
    Rational(Rational),
    Quadratic(QuadraticSurd),
    Real(RealAngle),
}

impl Angle {
    pub fn rational(p: i64, q: i64) -> Result<Angle> {
        if q <= 0 {
            return Err(Error::Parse(format!("denominator must be positive, got {q}")));
        }
        Ok(Angle::Rational(Rational::from((p, q))))
    }

    /// `(u + v√d)/w`; collapses to a rational when `v = 0` or `d` is a square.
    pub fn quadratic(u: impl Into<Integer>, v: impl Into<Integer>, d: impl Into<Integer>, w: impl Into<Integer>) -> Result<Angle> {
        Ok(match QuadraticSurd::new(u.into(), v.into(), d.into(), w.into())? {
            SurdOrRational::Surd(s) => Angle::Quadratic(s),
            SurdOrRational::Rational(r) => Angle::Rational(r),
        })
    }

    /// The golden mean `(√5 − 1)/2`.
    pub fn golden() -> Angle {
        Angle::quadratic(-1, 1, 5, 2).expect("valid constant")
    }

    /// `√2 − 1`.
    pub fn silver() -> Angle {
        Angle::quadratic(-1, 1, 2, 1).expect("valid constant")
    }

    /// The angle `[0; pre…, (period…)*]` with the given preperiod and
    /// purely periodic tail. An empty period yields the rational `[0; pre…]`.
    pub fn from_cf(preperiod: &[u64], period: &[u64]) -> Result<Angle> {
        if preperiod.iter().chain(period).any(|&a| a == 0) {
            return Err(Error::Parse("partial quotients must be positive".into()));
        }
        if period.is_empty() {
            let mut x = Rational::new();
            for &a in preperiod.iter().rev() {
                x = (x + a).recip();
            }
            return Ok(Angle::Rational(x));
        }
        // Purely periodic y = [0; a1..ap, y] solves q_{p-1} y² + (q_p − p_{p-1}) y − p_p = 0.
        let (mut p0, mut q0) = (Integer::from(1), Integer::new());
        let (mut p1, mut q1) = (Integer::new(), Integer::from(1));
        for &a in period {
            let p2 = Integer::from(&p1 * a) + &p0;
            let q2 = Integer::from(&q1 * a) + &q0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
        }
        // now (p1, q1) = (p_p, q_p), (p0, q0) = (p_{p-1}, q_{p-1})
        let b = Integer::from(&q1 - &p0);
        let disc = Integer::from(b.square_ref()) + Integer::from(&q0 * &p1) * 4u32;
        let mut y = match Angle::quadratic(-b, 1, disc, Integer::from(&q0 * 2u32))? {
            Angle::Quadratic(s) => s,
            _ => return Err(Error::Parse("periodic expansion collapsed to a rational".into())),
        };
        for &a in preperiod.iter().rev() {
            y = y.add_integer(&Integer::from(a)).recip();
        }
        Ok(Angle::Quadratic(y))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Angle::Rational(_))
    }

    /// `x − ⌊x⌋`, keeping the representation kind.
    pub fn frac(&self) -> Angle {
        match self {
            Angle::Rational(r) => {
                let (fract, _) = r.clone().fract_floor(Integer::new());
                Angle::Rational(fract)
            }
            Angle::Quadratic(s) => Angle::Quadratic(s.frac()),
            Angle::Real(x) => {
                let (fract, _) = x.center.clone().fract_floor(Integer::new());
                Angle::Real(RealAngle { center: fract, bits: x.bits })
            }
        }
    }

    /// `θ + k`, exact.
    pub fn add_integer(&self, k: i64) -> Angle {
        match self {
            Angle::Rational(r) => Angle::Rational(Rational::from(r + k)),
            Angle::Quadratic(s) => Angle::Quadratic(s.add_integer(&Integer::from(k))),
            Angle::Real(x) => Angle::Real(RealAngle { center: Rational::from(&x.center + k), bits: x.bits }),
        }
    }

    pub fn is_zero_mod1(&self) -> bool {
        match self.frac() {
            Angle::Rational(r) => r == 0,
            Angle::Quadratic(_) => false,
            Angle::Real(x) => x.center == 0,
        }
    }

    /// Exact `frac(mθ)`.
    pub fn mul_mod1(&self, m: u64) -> Result<Angle> {
        let mi = Integer::from(m);
        let out = match self {
            Angle::Rational(r) => Angle::Rational(Rational::from(r * &mi)).frac(),
            Angle::Quadratic(s) => Angle::Quadratic(s.mul_integer(&mi).frac()),
            Angle::Real(x) => {
                let lost = 64 - m.leading_zeros();
                if lost >= x.bits {
                    return Err(Error::PrecisionExhausted {
                        required_bits: u64::from(lost) + 1,
                        detail: format!("real angle with {} bits cannot be multiplied by {m}", x.bits),
                    });
                }
                Angle::Real(RealAngle { center: Rational::from(&x.center * &mi), bits: x.bits - lost }).frac()
            }
        };
        let width = out.width_bits();
        if width > MAX_EXACT_BITS {
            return Err(Error::PrecisionExhausted {
                required_bits: u64::from(width),
                detail: format!("exact representation of {m}·θ exceeds {MAX_EXACT_BITS} bits"),
            });
        }
        Ok(out)
    }

    /// Bit width of the largest exact integer in the representation.
    pub fn width_bits(&self) -> u32 {
        match self {
            Angle::Rational(r) => r.numer().significant_bits().max(r.denom().significant_bits()),
            Angle::Quadratic(s) => s.width_bits(),
            Angle::Real(x) => x.center.numer().significant_bits().max(x.center.denom().significant_bits()),
        }
    }

    /// Evaluation to `prec` bits (the center for real angles).
    pub fn to_float(&self, prec: u32) -> Float {
        match self {
            Angle::Rational(r) => Float::with_val(prec, r),
            Angle::Quadratic(s) => s.to_float(prec),
            Angle::Real(x) => Float::with_val(prec, &x.center),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    /// `frac(nθ)` to `bits` bits of relative precision, computed from the
    /// exact representation rather than by repeated floating addition.
    pub fn reduce(&self, n: u64, bits: u32) -> Result<Float> {
        if bits < 53 {
            return Err(Error::Precondition(format!("angle reduction needs at least 53 bits, got {bits}")));
        }
        if n == 0 {
            return Ok(Float::with_val(bits, 0));
        }
        let reduced = self.mul_mod1(n)?;
        self.check_real_precision(&reduced, n, bits)?;
        Ok(reduced.to_float(bits))
    }

    /// Signed distance of `nθ` to its nearest integer, in `[-1/2, 1/2)`, to
    /// `bits` bits of relative precision. This is the argument fed to
    /// `sin(π·)` when forming small divisors.
    pub fn centered_reduce(&self, n: u64, bits: u32) -> Result<Float> {
        if n == 0 {
            return Ok(Float::with_val(bits, 0));
        }
        let reduced = self.mul_mod1(n)?;
        let centered = match reduced {
            Angle::Rational(r) => {
                if r >= Rational::from((1, 2)) {
                    Angle::Rational(r - 1u32)
                } else {
                    Angle::Rational(r)
                }
            }
            Angle::Quadratic(s) => {
                if s.cmp_rational(&Rational::from((1, 2))) != Ordering::Less {
                    Angle::Quadratic(s.sub_integer(&Integer::from(1)))
                } else {
                    Angle::Quadratic(s)
                }
            }
            Angle::Real(x) => {
                let center = if x.center >= Rational::from((1, 2)) { x.center - 1u32 } else { x.center };
                Angle::Real(RealAngle { center, bits: x.bits })
            }
        };
        self.check_real_precision(&centered, n, bits)?;
        Ok(centered.to_float(bits))
    }

    fn check_real_precision(&self, reduced: &Angle, n: u64, bits: u32) -> Result<()> {
        let (Angle::Real(orig), Angle::Real(red)) = (self, reduced) else {
            return Ok(());
        };
        // absolute error n·2^-stored must stay below 2^(1-bits)·|value|
        let value = red.center.to_f64().abs();
        if value == 0.0 {
            return Err(Error::PrecisionExhausted {
                required_bits: u64::from(orig.bits) + 64,
                detail: format!("frac({n}·θ) is indistinguishable from 0"),
            });
        }
        let log_err = (n as f64).log2() - f64::from(orig.bits);
        let log_allowed = 1.0 - f64::from(bits) + value.log2();
        if log_err > log_allowed {
            let need = (f64::from(bits) + (n as f64).log2() - value.log2()).ceil() as u64;
            return Err(Error::PrecisionExhausted {
                required_bits: need,
                detail: format!("real angle stored with {} bits is too coarse for frac({n}·θ)", orig.bits),
            });
        }
        Ok(())
    }

    /// Parses `p/q`, `quad:u,v,D,w`, a decimal literal, or the names
    /// `golden` / `silver`.
    pub fn parse(text: &str) -> Result<Angle> {
        let t = text.trim();
        match t {
            "golden" => return Ok(Angle::golden()),
            "silver" => return Ok(Angle::silver()),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("quad:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("expected quad:u,v,D,w, got {t:?}")));
            }
            let ints = parts
                .iter()
                .map(|p| p.parse::<Integer>().map_err(|_| Error::Parse(format!("bad integer {p:?} in {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let [u, v, d, w]: [Integer; 4] = ints.try_into().expect("four parts");
            if d.cmp0() != Ordering::Greater {
                return Err(Error::Parse(format!("radicand must be positive in {t:?}")));
            }
            if w.cmp0() != Ordering::Greater {
                return Err(Error::Parse(format!("denominator must be positive in {t:?}")));
            }
            return Angle::quadratic(u, v, d, w);
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: Integer = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
            let q: Integer = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
            if q.cmp0() != Ordering::Greater {
                return Err(Error::Parse(format!("denominator must be positive in {t:?}")));
            }
            return Ok(Angle::Rational(Rational::from((p, q))));
        }
        parse_decimal(t)
    }
}

fn parse_decimal(t: &str) -> Result<Angle> {
    let err = || Error::Parse(format!("unrecognised angle {t:?}"));
    let (negative, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut mantissa: Integer = if digits.is_empty() { Integer::new() } else { digits.parse().map_err(|_| err())? };
    if negative {
        mantissa = -mantissa;
    }
    let scale = Integer::from(10).pow(frac_part.len() as u32);
    let center = Rational::from((mantissa, scale));
    if frac_part.is_empty() {
        return Ok(Angle::Rational(center));
    }
    // last digit carries half a unit of error: 0.5·10^-k ≤ 2^-bits
    let bits = ((frac_part.len() as f64) * std::f64::consts::LOG2_10 + 1.0).floor() as u32;
    Ok(Angle::Real(RealAngle { center, bits }))
}

impl FromStr for Angle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Angle> {
        Angle::parse(s)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Angle::Quadratic(s) => write!(f, "{s}"),
            Angle::Real(x) => {
                // fewest digits whose parse gives back `bits`; exact for parsed decimals
                let mut k = 1u32;
                while ((f64::from(k) * std::f64::consts::LOG2_10 + 1.0).floor() as u32) < x.bits {
                    k += 1;
                }
                let scaled = Rational::from(&x.center * Integer::from(10).pow(k)).round();
                let digits = scaled.numer().clone().abs().to_string();
                let digits = format!("{digits:0>width$}", width = k as usize + 1);
                let (int_part, frac_part) = digits.split_at(digits.len() - k as usize);
                let sign = if scaled.numer().cmp0() == Ordering::Less { "-" } else { "" };
                write!(f, "{sign}{int_part}.{frac_part}")
            }
        }
    }
}
