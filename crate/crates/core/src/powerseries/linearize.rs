//! Formal linearization `f∘h = h∘R_θ`, `h(Z) = Z + Σ_{n≥2} b_n Z^n`.
//!
//! Comparing coefficients of `Z^n` gives
//!
//! ```text
//! b_n (λ^n − λ) = Σ_{k≥2} a_k [Z^n] h^k
//! ```
//!
//! and for a rational germ `f = A/B` (with `B(0) = 1`), from `B(h)·h(λZ) = A(h)`,
//!
//! ```text
//! b_n (λ^n − λ) = Σ_{k≥2} A_k [Z^n] h^k − Σ_{k≥1} B_k Σ_{j=1}^{n−k} λ^j b_j [Z^{n−j}] h^k.
//! ```
//!
//! The right-hand sides only involve `b_1..b_{n−1}`. The powers `h^k` are
//! kept incrementally, so a germ whose numerator and denominator have degree
//! at most `d` costs `O(d·N²)`.

use std::io::Write;

use rug::{Complex, Float};
use serde::Serialize;

use super::germ::{GermForm, GermSeries};
use super::scalar::{Backend, ExtBackend, ExtComplex, MpBackend};
use crate::cfrac::Angle;
use crate::{Error, Result};

/// Coefficients of the linearizing series.
#[derive(Clone, Debug, Serialize)]
pub struct LinearizationResult {
    /// `b[n]` is the coefficient of `Z^n`; `b[0] = 0`, `b[1] = 1`.
    pub b: Vec<ExtComplex>,
    /// `divisors[n] = |λ^n − λ| = 2|sin(π(n−1)θ)|` for `n ≥ 2`; zero below.
    pub divisors: Vec<f64>,
    /// `flags[n]` is set when `b_n` left the representable range; all later
    /// coefficients are unset.
    pub flags: Vec<bool>,
    /// Largest `n` with a valid `b_n`.
    pub valid: usize,
    /// Working precision (53 selects the extended-exponent double backend).
    pub bits: u32,
}

impl LinearizationResult {
    pub fn len(&self) -> usize {
        self.valid
    }

    pub fn is_empty(&self) -> bool {
        self.valid == 0
    }

    /// CSV rows `n,re,im,log_abs,divisor` for `n = 1..=valid`. The real and
    /// imaginary parts are plain doubles and may under- or overflow; the
    /// logarithm is always accurate.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Precondition(format!("csv write failed: {e}"));
        w.write_record(["n", "re", "im", "log_abs", "divisor"]).map_err(io)?;
        for n in 1..=self.valid {
            let z = self.b[n].to_c64();
            w.write_record([
                n.to_string(),
                format!("{:e}", z.re),
                format!("{:e}", z.im),
                format!("{:e}", self.b[n].ln_abs()),
                format!("{:e}", self.divisors[n]),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Precondition(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

/// Computes `b_1..b_n`.
///
/// `bits ≤ 53` runs on doubles with an extended exponent; larger values use
/// MPFR at that precision. Small divisors come from the exact reduction of
/// `(n−1)θ` mod 1, never from subtracting powers of `λ`.
pub fn linearize(f: &GermSeries, n: usize, bits: u32) -> Result<LinearizationResult> {
    if n == 0 {
        return Err(Error::Precondition("need at least one coefficient".into()));
    }
    if let Some(t) = f.truncation() {
        if n > t {
            return Err(Error::Precondition(format!("series known to degree {t}, asked for {n}")));
        }
    }
    if let Angle::Rational(r) = f.theta.frac() {
        // (m−1)θ ∈ ℤ first happens at m − 1 = q
        let q = r.denom().to_usize().unwrap_or(usize::MAX);
        if q < n {
            return Err(Error::Resonance(q + 1));
        }
    }
    let work = bits.max(64) + 16;
    let mut turns = Vec::with_capacity(n + 1);
    turns.push(Float::new(work));
    for m in 1..=n as u64 {
        // turns[m] = centered frac(mθ) so that λ^m = e^{2πi·turns[m]}
        turns.push(f.theta.centered_reduce(m, work)?);
    }
    let (num, den) = match &f.form {
        GermForm::Polynomial(c) => (c.clone(), vec![Complex::with_val(f.prec, 1)]),
        GermForm::Series(c) => (c[..=n].to_vec(), vec![Complex::with_val(f.prec, 1)]),
        GermForm::Rational { num, den } => (num.clone(), den.clone()),
    };
    let (b, valid) = if bits <= 53 {
        run(&ExtBackend, &num, &den, n, &turns)
    } else {
        let be = MpBackend { prec: bits };
        let (b, valid) = run(&be, &num, &den, n, &turns);
        (b.iter().map(|z| be.to_ext(z)).collect(), valid)
    };
    let mut bb = vec![ExtComplex::ZERO; n + 1];
    bb[1..=b.len()].copy_from_slice(&b);
    let mut divisors = vec![0.0; n + 1];
    for m in 2..=n {
        divisors[m] = 2.0 * (std::f64::consts::PI * turns[m - 1].to_f64()).sin().abs();
    }
    let mut flags = vec![false; n + 1];
    for flag in flags.iter_mut().skip(valid + 1) {
        *flag = true;
    }
    Ok(LinearizationResult { b: bb, divisors, flags, valid, bits: bits.max(53) })
}

/// Returns `b_1..b_valid` (offset by one) and `valid`.
fn run<B: Backend>(be: &B, num: &[Complex], den: &[Complex], n: usize, turns: &[Float]) -> (Vec<B::C>, usize) {
    let last_nonzero = |c: &[Complex]| c.iter().rposition(|z| !z.is_zero()).unwrap_or(0);
    let da = last_nonzero(num);
    let db = last_nonzero(den);
    let kmax = da.max(db).max(1);
    let a: Vec<B::C> = num[..=da].iter().map(|z| be.from_mp(z)).collect();
    let bcoef: Vec<B::C> = den[..=db].iter().map(|z| be.from_mp(z)).collect();
    let lambda = be.unit(&turns[1]);
    let one = be.from_mp(&Complex::with_val(64, 1));

    // powers[k][m − k] = [Z^m] h^k; powers[1] holds b itself
    let mut powers: Vec<Vec<B::C>> = vec![Vec::new(); kmax + 1];
    powers[1].push(one);
    // c[j − 1] = λ^j b_j, only needed with a nontrivial denominator
    let mut c: Vec<B::C> = if db > 0 { vec![lambda.clone()] } else { Vec::new() };

    for m in 2..=n {
        for k in 2..=kmax.min(m) {
            let len = m - k + 1;
            let v = be.dot_reversed(&powers[1][..len], &powers[k - 1][..len]);
            powers[k].push(v);
        }
        let mut rhs = be.zero();
        for k in 2..=da.min(m) {
            if !num[k].is_zero() {
                be.add_assign(&mut rhs, &be.mul(&a[k], &powers[k][m - k]));
            }
        }
        for k in 1..=db.min(m - 1) {
            if den[k].is_zero() {
                continue;
            }
            let len = m - k;
            let l = be.dot_reversed(&c[..len], &powers[k][..len]);
            be.sub_assign(&mut rhs, &be.mul(&bcoef[k], &l));
        }
        // λ^m − λ = λ(e^{2πi(m−1)θ} − 1)
        let divisor = be.mul(&lambda, &be.unit_minus_one(&turns[m - 1]));
        let bm = be.div(&rhs, &divisor);
        if !be.is_finite(&bm) {
            return (powers.swap_remove(1), m - 1);
        }
        if db > 0 {
            c.push(be.mul(&be.unit(&turns[m]), &bm));
        }
        powers[1].push(bm);
    }
    (powers.swap_remove(1), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerseries::germ::{multiplier, to_mp};
    use num_complex::Complex64;

    fn quad(theta: &Angle) -> GermSeries {
        GermSeries::polynomial(theta, &[Complex64::new(1.0, 0.0)], 128, "quad").unwrap()
    }

    #[test]
    fn second_coefficient() {
        let th = Angle::golden();
        let l = linearize(&quad(&th), 8, 53).unwrap();
        let lam = super::super::germ::to_c64(&multiplier(&th, 128).unwrap());
        let expect = 1.0 / (lam * lam - lam);
        assert!((l.b[2].to_c64() - expect).norm() < 1e-14);
        assert_eq!(l.b[1], ExtComplex::ONE);
    }

    #[test]
    fn linear_germ_has_trivial_h() {
        let th = Angle::silver();
        let f = GermSeries::polynomial(&th, &[], 64, "linear").unwrap();
        let l = linearize(&f, 100, 53).unwrap();
        assert!(l.b[2..].iter().all(ExtComplex::is_zero));
    }

    #[test]
    fn resonance_is_an_error() {
        let th = Angle::rational(1, 3).unwrap();
        assert_eq!(linearize(&quad(&th), 4, 53).unwrap_err(), Error::Resonance(4));
        assert!(linearize(&quad(&th), 3, 53).is_ok());
    }

    #[test]
    fn backends_agree() {
        let th = Angle::from_cf(&[], &[2, 1, 3]).unwrap();
        let f = GermSeries::polynomial(&th, &[Complex64::new(0.5, 0.25), Complex64::new(-1.0, 0.0)], 128, "cubic").unwrap();
        let lo = linearize(&f, 200, 53).unwrap();
        let hi = linearize(&f, 200, 160).unwrap();
        for n in 1..=200 {
            let d = (lo.b[n].ln_abs() - hi.b[n].ln_abs()).abs();
            assert!(d < 1e-9, "n={n} {d}");
        }
    }

    #[test]
    fn divisors_match_sine() {
        let th = Angle::golden();
        let l = linearize(&quad(&th), 50, 53).unwrap();
        let g = th.to_f64();
        for n in 2..=50 {
            let s = 2.0 * (std::f64::consts::PI * (n as f64 - 1.0) * g).sin().abs();
            assert!((l.divisors[n] - s).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_form_matches_expanded_series() {
        let th = Angle::golden();
        let prec = 192;
        let lam = multiplier(&th, prec).unwrap();
        let num = vec![Complex::new(prec), lam.clone(), to_mp(Complex64::new(0.3, -0.1), prec)];
        let den = vec![Complex::with_val(prec, 1), to_mp(Complex64::new(-0.5, 0.2), prec)];
        let rat = GermSeries::rational(&th, num, den, prec, "rat").unwrap();
        let ser = GermSeries::series(&th, rat.coefficients(60), prec, "ser").unwrap();
        let a = linearize(&rat, 60, 160).unwrap();
        let b = linearize(&ser, 60, 160).unwrap();
        for n in 1..=60 {
            let d = a.b[n].sub(&b.b[n]);
            assert!(d.is_zero() || d.ln_abs() - a.b[n].ln_abs() < -60.0, "n={n}");
        }
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let l = linearize(&quad(&Angle::golden()), 5, 53).unwrap();
        let mut buf = Vec::new();
        l.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,re,im,log_abs,divisor\n1,1e0,0e0,0e0,0e0\n"));
        assert_eq!(text.lines().count(), 6);
    }
}
