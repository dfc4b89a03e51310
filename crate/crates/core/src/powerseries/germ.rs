//! Germs `f(z) = λz + O(z²)` with `λ = e^{2iπθ}`.

use std::fmt;

use num_complex::Complex64;
use rug::{Complex, Float};

use crate::cfrac::Angle;
use crate::{Error, Result};

/// How the coefficients of a germ are known.
#[derive(Clone, Debug, PartialEq)]
pub enum GermForm {
    /// `Σ a_k z^k`, index = power, exact beyond the last entry (zero).
    Polynomial(Vec<Complex>),
    /// `A(z)/B(z)` with `A(0) = 0`, `B(0) = 1`; index = power.
    Rational { num: Vec<Complex>, den: Vec<Complex> },
    /// Truncated power series, index = power; coefficients beyond the last
    /// entry are unknown.
    Series(Vec<Complex>),
}

/// A germ at an indifferent fixed point, with its rotation number.
#[derive(Clone, Debug, PartialEq)]
pub struct GermSeries {
    pub theta: Angle,
    pub form: GermForm,
    /// Precision of the stored coefficients in bits.
    pub prec: u32,
    /// Free-form description of where the germ came from.
    pub source: String,
}

/// `e^{2iπθ}` at `prec` bits, from the exact angle.
pub fn multiplier(theta: &Angle, prec: u32) -> Result<Complex> {
    let t = theta.centered_reduce(1, prec.max(64) + 8)?;
    let two_t = Float::with_val(prec.max(64) + 8, &t * 2u32);
    let c = two_t.clone().cos_pi();
    let s = two_t.sin_pi();
    Ok(Complex::with_val(prec, (c, s)))
}

/// Complex64 → MPC at `prec` (exact).
pub fn to_mp(z: Complex64, prec: u32) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

fn trim(mut v: Vec<Complex>) -> Vec<Complex> {
    while v.len() > 2 && v.last().is_some_and(Complex::is_zero) {
        v.pop();
    }
    v
}

impl GermSeries {
    /// `λz + Σ_{k≥2} higher[k−2] z^k`.
    pub fn polynomial(theta: &Angle, higher: &[Complex64], prec: u32, source: impl Into<String>) -> Result<Self> {
        let mut c = vec![Complex::new(prec), multiplier(theta, prec)?];
        c.extend(higher.iter().map(|&z| to_mp(z, prec)));
        Ok(GermSeries { theta: theta.clone(), form: GermForm::Polynomial(trim(c)), prec, source: source.into() })
    }

    /// Polynomial germ from full coefficients (index = power); the linear
    /// coefficient must be `λ`.
    pub fn from_coefficients(theta: &Angle, coeffs: Vec<Complex>, prec: u32, source: impl Into<String>) -> Result<Self> {
        check_linear(theta, &coeffs, prec)?;
        Ok(GermSeries { theta: theta.clone(), form: GermForm::Polynomial(trim(coeffs)), prec, source: source.into() })
    }

    /// Truncated series (index = power).
    pub fn series(theta: &Angle, coeffs: Vec<Complex>, prec: u32, source: impl Into<String>) -> Result<Self> {
        check_linear(theta, &coeffs, prec)?;
        Ok(GermSeries { theta: theta.clone(), form: GermForm::Series(coeffs), prec, source: source.into() })
    }

    /// `A/B`; `B` is normalized to `B(0) = 1`.
    pub fn rational(theta: &Angle, num: Vec<Complex>, den: Vec<Complex>, prec: u32, source: impl Into<String>) -> Result<Self> {
        let b0 = den.first().cloned().ok_or_else(|| Error::Precondition("empty denominator".into()))?;
        if b0.is_zero() {
            return Err(Error::Precondition("denominator vanishes at 0".into()));
        }
        let num: Vec<Complex> = num.iter().map(|a| Complex::with_val(prec, a / &b0)).collect();
        let den: Vec<Complex> = den.iter().map(|a| Complex::with_val(prec, a / &b0)).collect();
        check_linear(theta, &num, prec)?;
        Ok(GermSeries {
            theta: theta.clone(),
            form: GermForm::Rational { num: trim(num), den: trim(den) },
            prec,
            source: source.into(),
        })
    }

    /// Number of known Taylor coefficients beyond which the germ is
    /// unknown (`None` when all are determined).
    pub fn truncation(&self) -> Option<usize> {
        match &self.form {
            GermForm::Series(c) => Some(c.len() - 1),
            _ => None,
        }
    }

    /// Degree for polynomial germs.
    pub fn degree(&self) -> Option<usize> {
        match &self.form {
            GermForm::Polynomial(c) => Some(c.len() - 1),
            _ => None,
        }
    }

    pub fn lambda(&self) -> Complex {
        self.coefficients(1)[1].clone()
    }

    /// Taylor coefficients `a_0..a_n` (index = power); zero past a
    /// polynomial's degree.
    pub fn coefficients(&self, n: usize) -> Vec<Complex> {
        let mut out = vec![Complex::new(self.prec); n + 1];
        match &self.form {
            GermForm::Polynomial(c) | GermForm::Series(c) => {
                for (o, a) in out.iter_mut().zip(c) {
                    *o = a.clone();
                }
            }
            GermForm::Rational { num, den } => {
                // out·den = num, den[0] = 1
                for k in 0..=n {
                    let mut acc = num.get(k).cloned().unwrap_or_else(|| Complex::new(self.prec));
                    for j in 1..=k.min(den.len() - 1) {
                        acc -= Complex::with_val(self.prec, &den[j] * &out[k - j]);
                    }
                    out[k] = acc;
                }
            }
        }
        out
    }

    pub fn coefficients_c64(&self, n: usize) -> Vec<Complex64> {
        self.coefficients(n).iter().map(to_c64).collect()
    }

    /// `f(z)` in double precision (series forms use the stored terms only).
    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let horner = |c: &[Complex]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + to_c64(a));
        match &self.form {
            GermForm::Polynomial(c) | GermForm::Series(c) => horner(c),
            GermForm::Rational { num, den } => horner(num) / horner(den),
        }
    }
}

fn check_linear(theta: &Angle, coeffs: &[Complex], prec: u32) -> Result<()> {
    if coeffs.len() < 2 || !coeffs[0].is_zero() {
        return Err(Error::Precondition("germ must fix 0 and have a linear term".into()));
    }
    let lambda = multiplier(theta, prec)?;
    let diff = Complex::with_val(prec, &coeffs[1] - &lambda);
    let err = to_c64(&diff).norm();
    let tol = 2f64.powi(-(prec.min(1000) as i32) / 2).max(1e-300);
    if err > tol {
        return Err(Error::Precondition(format!("linear coefficient differs from e^(2iπθ) by {err:.3e}")));
    }
    Ok(())
}

impl fmt::Display for GermSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at θ={}", self.source, self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_is_unimodular() {
        let l = multiplier(&Angle::golden(), 256).unwrap();
        let m = Float::with_val(256, l.abs_ref());
        assert!((m - 1u32).abs() < 1e-70);
    }

    #[test]
    fn rational_expansion() {
        // λz/(1 − z) = λ(z + z² + …)
        let th = Angle::golden();
        let lam = multiplier(&th, 128).unwrap();
        let f = GermSeries::rational(
            &th,
            vec![Complex::new(128), lam.clone()],
            vec![Complex::with_val(128, 1), Complex::with_val(128, -1)],
            128,
            "pole",
        )
        .unwrap();
        for a in &f.coefficients(8)[1..] {
            assert!(to_c64(&Complex::with_val(128, a - &lam)).norm() < 1e-30);
        }
    }

    #[test]
    fn wrong_multiplier_is_rejected() {
        let th = Angle::golden();
        let bad = vec![Complex::new(64), Complex::with_val(64, 1)];
        assert!(GermSeries::from_coefficients(&th, bad, 64, "x").is_err());
    }
}
