//! Germ families: the quadratic polynomial `P_θ`, its perturbations and
//! rescalings, boundary germs of `z^d + c`, the families `λz(1−z)^{d−1}` and
//! `λ(z + z^d)`, a few closed-form univalent germs, and the polynomial `G_f`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::cfrac::Angle;
use crate::powerseries::{compose_oracle, conjugate_germ, multiplier, to_c64, to_mp, GermForm, GermSeries};
use crate::{Error, Result};

/// Radii attached to the quadratic-like restriction of `f + az²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerturbationConstants {
    /// Perturbations with `|a|` above this radius are quadratic-like.
    pub outer_radius: f64,
    /// Circle used for averaging.
    pub average_circle: f64,
    pub v_radius: f64,
    pub u_cap: f64,
}

pub const PERTURBATION: PerturbationConstants =
    PerturbationConstants { outer_radius: 10.0, average_circle: 11.0, v_radius: 13.0 / 36.0, u_cap: 1.0 / 3.0 };

/// `P_θ(z) = λz + z²`.
pub fn quad_germ(theta: &Angle, prec: u32) -> Result<GermSeries> {
    GermSeries::polynomial(theta, &[Complex64::new(1.0, 0.0)], prec, "quad")
}

/// `R_θ(z) = λz`.
pub fn linear_germ(theta: &Angle, prec: u32) -> Result<GermSeries> {
    GermSeries::polynomial(theta, &[], prec, "linear")
}

/// `λ(z + z³/4)`, univalent on the unit disk.
pub fn cubic_germ(theta: &Angle, prec: u32) -> Result<GermSeries> {
    let lam = multiplier(theta, prec)?;
    let quarter = Complex::with_val(prec, &lam / 4u32);
    let coeffs = vec![Complex::new(prec), lam, Complex::new(prec), quarter];
    GermSeries::from_coefficients(theta, coeffs, prec, "cubic")
}

/// `λz/(1 − z)`, univalent on the unit disk. Its linearization is the
/// Möbius map fixing 0 and sending ∞ to the second fixed point `1 − λ`;
/// the radius of convergence is `|1 − λ|`.
pub fn mobius_pole_germ(theta: &Angle, prec: u32) -> Result<GermSeries> {
    let lam = multiplier(theta, prec)?;
    GermSeries::rational(
        theta,
        vec![Complex::new(prec), lam],
        vec![Complex::with_val(prec, 1), Complex::with_val(prec, -1)],
        prec,
        "mobius-pole",
    )
}

/// `h∘R_θ∘h⁻¹` for `h = z/(1 − z)` in closed form: `λz/(1 + (1 − λ)z)`.
/// Its linearizing series is `h` itself (`b_n = 1`).
pub fn mobius_conjugate_germ(theta: &Angle, prec: u32) -> Result<GermSeries> {
    let lam = multiplier(theta, prec)?;
    let c = Complex::with_val(prec, 1 - &lam);
    GermSeries::rational(theta, vec![Complex::new(prec), lam], vec![Complex::with_val(prec, 1), c], prec, "conjugate:mobius")
}

/// Conjugating maps `h` understood by [`FamilySpec::Conjugate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConjugatingMap {
    /// `z/(1 − z)`
    Mobius,
    /// `e^z − 1`
    Expm1,
}

impl ConjugatingMap {
    /// Coefficients of `h` through degree `n` (index = power).
    pub fn coefficients(self, n: usize, prec: u32) -> Vec<Complex> {
        let mut out = vec![Complex::new(prec)];
        let mut fact = Float::with_val(prec, 1);
        for k in 1..=n as u32 {
            out.push(match self {
                ConjugatingMap::Mobius => Complex::with_val(prec, 1),
                ConjugatingMap::Expm1 => {
                    fact *= k;
                    Complex::with_val(prec, fact.clone().recip())
                }
            });
        }
        out
    }
}

/// `f + az²`.
pub fn perturbed(f: &GermSeries, a: Complex64) -> GermSeries {
    let prec = f.prec;
    let add = |c: &mut Vec<Complex>, k: usize, z: &Complex| {
        while c.len() <= k {
            c.push(Complex::new(prec));
        }
        c[k] += z;
    };
    let a = to_mp(a, prec);
    let form = match &f.form {
        GermForm::Polynomial(c) => {
            let mut c = c.clone();
            add(&mut c, 2, &a);
            GermForm::Polynomial(c)
        }
        GermForm::Series(c) => {
            let mut c = c.clone();
            if c.len() > 2 {
                add(&mut c, 2, &a);
            }
            GermForm::Series(c)
        }
        GermForm::Rational { num, den } => {
            // A/B + az² = (A + az²B)/B
            let mut num = num.clone();
            for (k, b) in den.iter().enumerate() {
                add(&mut num, k + 2, &Complex::with_val(prec, &a * b));
            }
            GermForm::Rational { num, den: den.clone() }
        }
    };
    GermSeries { theta: f.theta.clone(), form, prec, source: format!("{}+az²", f.source) }
}

/// `a·f(z/a)`: the `k`-th coefficient is multiplied by `a^{1−k}`.
pub fn rescale(f: &GermSeries, a: Complex64) -> Result<GermSeries> {
    if a == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroScale);
    }
    let prec = f.prec;
    let inv = Complex::with_val(prec, to_mp(a, prec).recip());
    // p runs through a^{−k}
    let scaled = |c: &[Complex], shift: bool| -> Vec<Complex> {
        let mut p = Complex::with_val(prec, 1);
        let mut out = Vec::with_capacity(c.len());
        for (k, z) in c.iter().enumerate() {
            if k > 0 {
                p *= &inv;
            }
            let mut v = Complex::with_val(prec, z * &p);
            if shift {
                v *= to_mp(a, prec);
            }
            out.push(v);
        }
        out
    };
    let form = match &f.form {
        GermForm::Polynomial(c) => GermForm::Polynomial(scaled(c, true)),
        GermForm::Series(c) => GermForm::Series(scaled(c, true)),
        GermForm::Rational { num, den } => GermForm::Rational { num: scaled(num, true), den: scaled(den, false) },
    };
    Ok(GermSeries { theta: f.theta.clone(), form, prec, source: format!("rescaled({})", f.source) })
}

/// A translated boundary germ of `z^d + c` at a fixed point with multiplier `λ`.
#[derive(Clone, Debug)]
pub struct UnicriticalGerm {
    pub germ: GermSeries,
    pub c: Complex64,
    pub alpha: Complex64,
    /// `|α^d + c − α|`
    pub fixed_residual: f64,
    /// `|dα^{d−1} − λ|`
    pub multiplier_residual: f64,
}

/// `F(w) = f(α + w) − α` for `f(z) = z^d + c`, where `α = (λ/d)^{1/(d−1)}`
/// (principal branch rotated by `e^{2iπ·branch/(d−1)}`) and `c = α − α^d`.
pub fn unicritical_boundary_germ(d: u32, theta: &Angle, branch: u32, prec: u32) -> Result<UnicriticalGerm> {
    if d < 2 {
        return Err(Error::Precondition(format!("degree must be at least 2, got {d}")));
    }
    let lam = multiplier(theta, prec)?;
    let e = d - 1;
    let base = Complex::with_val(prec, &lam / d);
    let mut alpha = Complex::with_val(prec, base.ln() / e).exp();
    if !branch.is_multiple_of(e) {
        let turn = Float::with_val(prec, 2 * (branch % e)) / e;
        let rot = Complex::with_val(prec, (turn.clone().cos_pi(), turn.sin_pi()));
        alpha *= rot;
    }
    let pow = |k: u32| -> Complex {
        let mut p = Complex::with_val(prec, 1);
        for _ in 0..k {
            p *= &alpha;
        }
        p
    };
    let alpha_d = pow(d);
    let c = Complex::with_val(prec, &alpha - &alpha_d);
    // coefficient of w^k: binom(d, k) α^{d−k}
    let mut coeffs = vec![Complex::new(prec)];
    let mut binom = rug::Integer::from(1);
    for k in 1..=d {
        binom = binom * (d - k + 1) / k;
        coeffs.push(Complex::with_val(prec, pow(d - k) * &binom));
    }
    let mult = Complex::with_val(prec, pow(e) * d);
    let multiplier_residual = to_c64(&Complex::with_val(prec, &mult - &lam)).norm();
    let fixed = Complex::with_val(prec, &alpha_d + &c) - &alpha;
    let fixed_residual = to_c64(&Complex::with_val(prec, fixed)).norm();
    // the linear coefficient is λ up to rounding; use the exact multiplier
    coeffs[1] = lam;
    let germ = GermSeries::from_coefficients(theta, coeffs, prec, format!("unicritical:{d}"))?;
    Ok(UnicriticalGerm { germ, c: to_c64(&c), alpha: to_c64(&alpha), fixed_residual, multiplier_residual })
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=n {
        let prev = row[k as usize - 1];
        row.push(prev * f64::from(n - k + 1) / f64::from(k));
    }
    row
}

/// `λz(1 − z)^{d−1}`: coefficient of `z^{k+1}` is `λ·binom(d−1, k)(−1)^k`.
pub fn geyer_germ(d: u32, theta: &Angle, prec: u32) -> Result<GermSeries> {
    if d < 2 {
        return Err(Error::Precondition(format!("degree must be at least 2, got {d}")));
    }
    let lam = multiplier(theta, prec)?;
    let mut coeffs = vec![Complex::new(prec)];
    for (k, b) in binomial_row(d - 1).into_iter().enumerate() {
        let s = if k % 2 == 0 { b } else { -b };
        coeffs.push(Complex::with_val(prec, &lam * s));
    }
    GermSeries::from_coefficients(theta, coeffs, prec, format!("geyer:{d}"))
}

/// `λ(z + z^d)`.
pub fn dstar_germ(d: u32, theta: &Angle, prec: u32) -> Result<GermSeries> {
    if d < 2 {
        return Err(Error::Precondition(format!("degree must be at least 2, got {d}")));
    }
    let lam = multiplier(theta, prec)?;
    let mut coeffs = vec![Complex::new(prec); d as usize + 1];
    coeffs[1] = lam.clone();
    coeffs[d as usize] = lam;
    GermSeries::from_coefficients(theta, coeffs, prec, format!("dstar:{d}"))
}

/// Largest coefficient of `φ∘f − g∘φ` through degree `n`, with
/// `φ(z) = −z^{d−1}`, `f = λ(z + z^d)` at angle `θ` and `g` the family
/// `μz(1−z)^{d−1}` at angle `target`.
pub fn semiconjugacy_residual_with(d: u32, theta: &Angle, target: &Angle, n: usize) -> Result<f64> {
    let f = dstar_germ(d, theta, 128)?.coefficients_c64(n);
    let g = geyer_germ(d, target, 128)?.coefficients_c64(n);
    let mut phi = vec![Complex64::new(0.0, 0.0); d as usize];
    phi[d as usize - 1] = Complex64::new(-1.0, 0.0);
    let lhs = compose_oracle(&phi, &f, n)?;
    let rhs = compose_oracle(&g, &phi, n)?;
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// [`semiconjugacy_residual_with`] at the matching angle `(d − 1)θ`.
pub fn semiconjugacy_residual(d: u32, theta: &Angle, n: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Precondition(format!("degree must be at least 2, got {d}")));
    }
    semiconjugacy_residual_with(d, theta, &theta.mul_mod1(u64::from(d - 1))?, n)
}

/// Zeros of `G_f = ∏(z − w_i)^{n_i} ∏(z − u_j)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GfSpec {
    /// `(w_i, n_i)` with `n_i ≥ 2`.
    pub w: Vec<(Complex64, u32)>,
    /// Indifferent periodic points; must contain 0.
    pub u: Vec<Complex64>,
}

impl GfSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.u.iter().any(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(Error::Precondition("u must contain 0".into()));
        }
        if let Some((_, n)) = self.w.iter().find(|(_, n)| *n < 2) {
            return Err(Error::Precondition(format!("local degree {n} below 2")));
        }
        let pts: Vec<Complex64> = self.w.iter().map(|p| p.0).chain(self.u.iter().copied()).collect();
        for (i, a) in pts.iter().enumerate() {
            if pts[i + 1..].contains(a) {
                return Err(Error::Precondition(format!("repeated point {a}")));
            }
        }
        Ok(())
    }
}

/// Expanded coefficients of `G_f` (index = power).
pub fn build_g(spec: &GfSpec) -> Result<Vec<Complex64>> {
    spec.validate()?;
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let factors = spec.w.iter().copied().chain(spec.u.iter().map(|&z| (z, 2)));
    for (root, mult) in factors {
        for _ in 0..mult {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= root * c;
            }
            poly = next;
        }
    }
    Ok(poly)
}

/// Germ families addressable from configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Quad,
    Linear,
    Cubic,
    MobiusPole,
    Unicritical(u32),
    Geyer(u32),
    Dstar(u32),
    Conjugate(ConjugatingMap),
}

impl FamilySpec {
    /// Builds the germ at angle `theta`. Conjugate germs are generated
    /// through degree `n`; the Möbius conjugate uses its closed form.
    pub fn build(&self, theta: &Angle, n: usize, prec: u32) -> Result<GermSeries> {
        match *self {
            FamilySpec::Quad => quad_germ(theta, prec),
            FamilySpec::Linear => linear_germ(theta, prec),
            FamilySpec::Cubic => cubic_germ(theta, prec),
            FamilySpec::MobiusPole => mobius_pole_germ(theta, prec),
            FamilySpec::Unicritical(d) => Ok(unicritical_boundary_germ(d, theta, 0, prec)?.germ),
            FamilySpec::Geyer(d) => geyer_germ(d, theta, prec),
            FamilySpec::Dstar(d) => dstar_germ(d, theta, prec),
            FamilySpec::Conjugate(ConjugatingMap::Mobius) => mobius_conjugate_germ(theta, prec),
            FamilySpec::Conjugate(h) => conjugate_germ(&h.coefficients(n, prec), theta, n, self.to_string()),
        }
    }

    /// Germs from this list are univalent on the unit disk.
    pub fn is_univalent_whitelisted(&self) -> bool {
        matches!(self, FamilySpec::Linear | FamilySpec::MobiusPole | FamilySpec::Cubic)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Quad => write!(f, "quad"),
            FamilySpec::Linear => write!(f, "linear"),
            FamilySpec::Cubic => write!(f, "cubic"),
            FamilySpec::MobiusPole => write!(f, "mobius-pole"),
            FamilySpec::Unicritical(d) => write!(f, "unicritical:{d}"),
            FamilySpec::Geyer(d) => write!(f, "geyer:{d}"),
            FamilySpec::Dstar(d) => write!(f, "dstar:{d}"),
            FamilySpec::Conjugate(ConjugatingMap::Mobius) => write!(f, "conjugate:mobius"),
            FamilySpec::Conjugate(ConjugatingMap::Expm1) => write!(f, "conjugate:expm1"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let degree = |rest: &str| -> Result<u32> {
            let d: u32 = rest.parse().map_err(|_| Error::Parse(format!("bad degree in family {s:?}")))?;
            if d < 2 {
                return Err(Error::Parse(format!("degree must be at least 2 in family {s:?}")));
            }
            Ok(d)
        };
        match s {
            "quad" => return Ok(FamilySpec::Quad),
            "linear" => return Ok(FamilySpec::Linear),
            "cubic" => return Ok(FamilySpec::Cubic),
            "mobius-pole" => return Ok(FamilySpec::MobiusPole),
            "conjugate:mobius" => return Ok(FamilySpec::Conjugate(ConjugatingMap::Mobius)),
            "conjugate:expm1" => return Ok(FamilySpec::Conjugate(ConjugatingMap::Expm1)),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("unicritical:") {
            return Ok(FamilySpec::Unicritical(degree(rest)?));
        }
        if let Some(rest) = s.strip_prefix("geyer:") {
            return Ok(FamilySpec::Geyer(degree(rest)?));
        }
        if let Some(rest) = s.strip_prefix("dstar:") {
            return Ok(FamilySpec::Dstar(degree(rest)?));
        }
        Err(Error::Parse(format!("unknown family {s:?}")))
    }
}
